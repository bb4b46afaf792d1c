"""Desk-scale evaluation: region style accuracy, PSNR, boundary seams."""

from __future__ import annotations

import numpy as np

from ..model import vocab
from .blend import latent_to_pixel_mask


def psnr(a, b, peak=1.0):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    mse = float(((a - b) ** 2).mean())
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(peak * peak / mse)


def _prompt_style(prompt):
    pattern = next((t for t in prompt if t in vocab.PATTERNS), "solid")
    color = next((t for t in prompt if t in vocab.COLORS), None)
    return pattern, color


def style_record(image, pixel_mask, prompt, depth):
    """Style check of one pixel region.

    Color: nearest vocabulary color of the mean over foreground (depth > 0)
    pixels restricted to the prompt pattern's on-template (the whole
    foreground for solid). Pattern: procedural detector over the foreground.
    """
    image = np.asarray(image, dtype=np.float64)
    depth = np.asarray(depth)
    pattern, color = _prompt_style(prompt)
    fg = np.asarray(pixel_mask, dtype=bool) & (depth > 0)
    record = {"prompt": list(prompt), "pattern": pattern, "color": color,
              "pixels": int(fg.sum())}
    if not fg.any() or color is None:
        record.update(color_match=False, pattern_match=False, margin=0.0,
                      mean_rgb=None, detected_pattern=None)
        return record
    on = fg & vocab.pattern_on_mask(pattern, *depth.shape)
    sel = on if on.any() else fg
    mean_rgb = image[sel].mean(axis=0)
    nearest, margin = vocab.nearest_color(mean_rgb)
    detected, _, errors = vocab.classify_pattern(image, fg, color)
    record.update(
        color_match=bool(nearest == color),
        nearest_color=nearest,
        margin=float(margin),
        mean_rgb=[float(v) for v in mean_rgb],
        detected_pattern=detected,
        pattern_match=bool(detected == pattern),
        pattern_errors={p: float(e) for p, e in errors.items()},
    )
    return record


def region_style_accuracy(image, regions, prompts, depth, patch):
    """Per-region style records for a generated image (latent-grid regions)."""
    records = []
    for k, (latent_mask, prompt) in enumerate(
            zip(regions.latent_masks, prompts), start=1):
        px = latent_to_pixel_mask(latent_mask, patch)
        record = style_record(image, px, prompt, depth)
        record["region"] = k
        records.append(record)
    return records


def global_style_accuracy(image, prompt, depth):
    """Whole-foreground style record."""
    full = np.ones(np.asarray(depth).shape, dtype=bool)
    return style_record(image, full, prompt, depth)


def boundary_ring(pixel_mask):
    """One-pixel ring across the mask boundary (4-neighborhood)."""
    m = np.asarray(pixel_mask, dtype=bool)
    grow = m.copy()
    shrink = m.copy()
    for axis in (0, 1):
        for shift in (1, -1):
            rolled = np.roll(m, shift, axis=axis)
            if shift == 1:
                rolled[tuple(slice(0, 1) if a == axis else slice(None)
                             for a in (0, 1))] = False
            else:
                rolled[tuple(slice(-1, None) if a == axis else slice(None)
                             for a in (0, 1))] = False
            grow |= rolled
            shrink &= rolled
    return grow & ~shrink


def boundary_seam_metric(image, pixel_mask):
    """Mean gradient magnitude over the mask boundary ring."""
    img = np.asarray(image, dtype=np.float64)
    gray = img.mean(axis=2) if img.ndim == 3 else img
    gy, gx = np.gradient(gray)
    mag = np.hypot(gx, gy)
    ring = boundary_ring(pixel_mask)
    if not ring.any():
        return 0.0
    return float(mag[ring].mean())
