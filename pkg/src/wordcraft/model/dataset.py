"""Procedural synthetic dataset: styled glyphs over styled backgrounds.

Each example is fully determined by (glyph, foreground pattern+color,
background color), so region-level claims about trained outputs can be
checked against the vocabulary's procedural definitions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..glyph import compose_word, depth_from_coverage, load_word
from . import vocab


@dataclass(frozen=True)
class GlyphSpec:
    name: str
    coverage: np.ndarray  # (H, W) in [0, 1]
    depth: np.ndarray     # (H, W) normalized interior distance


@dataclass(frozen=True)
class TrainingExample:
    image: np.ndarray     # (H, W, 3) target
    tokens: tuple         # (pattern, color, background-token), UNKs possible
    depth: np.ndarray     # (H, W)
    glyph_id: str


def _shape_coverage(name, size):
    yy, xx = np.mgrid[0:size, 0:size]
    cy = cx = (size - 1) / 2.0
    r = size * 0.38
    if name == "disk":
        return ((yy - cy) ** 2 + (xx - cx) ** 2 <= r * r).astype(float)
    if name == "ring":
        d2 = (yy - cy) ** 2 + (xx - cx) ** 2
        return ((d2 <= r * r) & (d2 >= (r * 0.45) ** 2)).astype(float)
    if name == "square":
        half = size * 0.36
        return ((np.abs(yy - cy) <= half) & (np.abs(xx - cx) <= half)).astype(float)
    if name == "frame":
        half, inner = size * 0.38, size * 0.2
        box = (np.abs(yy - cy) <= half) & (np.abs(xx - cx) <= half)
        hole = (np.abs(yy - cy) <= inner) & (np.abs(xx - cx) <= inner)
        return (box & ~hole).astype(float)
    if name == "diamond":
        return ((np.abs(yy - cy) + np.abs(xx - cx)) <= size * 0.42).astype(float)
    if name == "cross":
        arm = size * 0.14
        body = (np.abs(xx - cx) <= arm) | (np.abs(yy - cy) <= arm)
        inside = (np.abs(yy - cy) <= size * 0.4) & (np.abs(xx - cx) <= size * 0.4)
        return (body & inside).astype(float)
    if name == "triangle":
        h = size * 0.78
        y0 = cy + h / 2
        return ((yy <= y0) & (yy >= y0 - h)
                & (np.abs(xx - cx) <= (y0 - yy) * 0.55)).astype(float)
    if name == "bar":
        return ((np.abs(yy - cy) <= size * 0.16)
                & (np.abs(xx - cx) <= size * 0.42)).astype(float)
    raise KeyError(name)


PROCEDURAL_SHAPES = ("disk", "ring", "square", "frame", "diamond", "cross",
                     "triangle", "bar")


def builtin_glyph_set(size, font_bytes=None, characters="IOKH"):
    """Procedural shapes plus (optionally) rasterized font characters."""
    glyphs = []
    for name in PROCEDURAL_SHAPES:
        cov = _shape_coverage(name, size)
        glyphs.append(GlyphSpec(name=name, coverage=cov,
                                depth=depth_from_coverage(cov).values))
    if font_bytes is not None:
        for ch in characters:
            cov = compose_word(load_word(font_bytes, ch), size, size).values
            glyphs.append(GlyphSpec(name=f"char:{ch}", coverage=cov,
                                    depth=depth_from_coverage(cov).values))
    return glyphs


def render_target(glyph, pattern, color, bg_color):
    return vocab.render_example_image(glyph.depth > 0, pattern, color, bg_color)


def synth_dataset(glyphs, count, seed, token_dropout=0.1):
    """Uniformly sampled examples; bit-identical for a fixed seed.

    token_dropout replaces an individual prompt token with UNK, which trains
    robustness to the shorter prompts used at inference time.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    colors = list(vocab.COLORS.keys())
    patterns = list(vocab.PATTERNS)
    examples = []
    for _ in range(count):
        glyph = glyphs[rng.integers(len(glyphs))]
        pattern = patterns[rng.integers(len(patterns))]
        color = colors[rng.integers(len(colors))]
        bg = colors[rng.integers(len(colors))]
        tokens = [pattern, color, vocab.background_token(bg)]
        if token_dropout > 0:
            tokens = [vocab.UNK if rng.random() < token_dropout else t
                      for t in tokens]
        examples.append(TrainingExample(
            image=render_target(glyph, pattern, color, bg),
            tokens=tuple(tokens),
            depth=glyph.depth,
            glyph_id=glyph.name,
        ))
    return examples
