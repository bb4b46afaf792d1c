"""Seeded style-accuracy benchmark over a trained checkpoint.

Global: single-prompt generations, nearest-color classification of the whole
foreground. Regional: two-region (left/right) generations with distinct
colors, per-region classification. Everything derives deterministically from
the benchmark seed.
"""

from __future__ import annotations

import numpy as np

from ..attention import resolve_regions
from ..model import vocab
from ..prompt import PromptBundle
from .metrics import global_style_accuracy, region_style_accuracy
from .schedule import Schedule


def left_right_regions(grid):
    rows, cols = grid
    left = np.zeros((rows, cols), dtype=bool)
    left[:, :cols // 2] = True
    return resolve_regions([left, ~left])


def _sample_style(rng):
    pattern = vocab.PATTERNS[rng.integers(len(vocab.PATTERNS))]
    color = list(vocab.COLORS)[rng.integers(len(vocab.COLORS))]
    return pattern, color


def run_benchmark(engine, glyphs, n_global=100, n_regional=100, seed=0,
                  steps=32):
    """Returns a report dict with per-case records and summary accuracies."""
    rng = np.random.default_rng(seed)
    schedule = Schedule(steps=steps)
    colors = list(vocab.COLORS)
    report = {"seed": int(seed), "steps": int(steps),
              "global": [], "regional": []}

    for i in range(n_global):
        glyph = glyphs[rng.integers(len(glyphs))]
        pattern, color = _sample_style(rng)
        bg = colors[rng.integers(len(colors))]
        bundle = PromptBundle(
            task="global", character=glyph.name,
            base_prompt=(pattern, color, vocab.background_token(bg)))
        gen_seed = int(rng.integers(2 ** 31))
        image, _ = engine.generate(bundle, glyph.depth, seed=gen_seed,
                                   schedule=schedule)
        rec = global_style_accuracy(image, [pattern, color], glyph.depth)
        rec.update(case=i, glyph=glyph.name, seed=gen_seed, background=bg)
        report["global"].append(rec)

    regions = left_right_regions(engine.config.grid)
    for i in range(n_regional):
        glyph = glyphs[rng.integers(len(glyphs))]
        p1, c1 = _sample_style(rng)
        p2, c2 = _sample_style(rng)
        while c2 == c1:
            c2 = colors[rng.integers(len(colors))]
        bg = colors[rng.integers(len(colors))]
        bundle = PromptBundle(
            task="multi_regional", character=glyph.name,
            base_prompt=(vocab.background_token(bg),),
            regions=((1, (p1, c1)), (2, (p2, c2))))
        gen_seed = int(rng.integers(2 ** 31))
        image, _ = engine.generate(bundle, glyph.depth, regions=regions,
                                   seed=gen_seed, schedule=schedule)
        recs = region_style_accuracy(image, regions, bundle.region_prompts,
                                     glyph.depth, engine.config.patch_size)
        for rec in recs:
            rec.update(case=i, glyph=glyph.name, seed=gen_seed, background=bg)
        report["regional"].extend(recs)

    g_total = len(report["global"])
    r_total = len(report["regional"])
    report["summary"] = {
        "global_color_accuracy":
            sum(r["color_match"] for r in report["global"]) / max(g_total, 1),
        "global_pattern_accuracy":
            sum(r["pattern_match"] for r in report["global"]) / max(g_total, 1),
        "regional_color_accuracy":
            sum(r["color_match"] for r in report["regional"]) / max(r_total, 1),
        "regional_pattern_accuracy":
            sum(r["pattern_match"] for r in report["regional"]) / max(r_total, 1),
        "global_cases": g_total,
        "regional_records": r_total,
    }
    return report
