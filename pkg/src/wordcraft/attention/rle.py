"""Run-length mask exchange format.

`rle:<width>x<height>:<run>,<run>,...` — runs alternate zero/one starting
with zero, row-major over the pixel grid. Runs must sum to width*height.
"""

from __future__ import annotations

import numpy as np


def encode_rle(mask):
    mask = np.asarray(mask).astype(bool)
    h, w = mask.shape
    flat = mask.reshape(-1)
    starts = np.flatnonzero(np.diff(flat)) + 1
    bounds = np.concatenate([[0], starts, [flat.size]])
    runs = np.diff(bounds).tolist()
    if flat[0]:
        runs.insert(0, 0)  # encoding always starts with a zero run
    return f"rle:{w}x{h}:" + ",".join(str(r) for r in runs)


def decode_rle(text):
    if not text.startswith("rle:"):
        raise ValueError("not an rle string")
    try:
        _, dims, payload = text.split(":", 2)
        w_s, h_s = dims.split("x")
        w, h = int(w_s), int(h_s)
    except ValueError as exc:
        raise ValueError(f"malformed rle header: {text[:40]!r}") from exc
    if w < 1 or h < 1:
        raise ValueError(f"bad rle dimensions {w}x{h}")
    runs = [int(r) for r in payload.split(",")] if payload else []
    if any(r < 0 for r in runs):
        raise ValueError("negative run length")
    if sum(runs) != w * h:
        raise ValueError(f"rle runs sum to {sum(runs)}, expected {w * h}")
    flat = np.zeros(w * h, dtype=bool)
    pos = 0
    value = False
    for r in runs:
        if value:
            flat[pos:pos + r] = True
        pos += r
        value = not value
    return flat.reshape(h, w)
