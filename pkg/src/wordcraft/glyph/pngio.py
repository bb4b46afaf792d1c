"""PNG import/export. Grayscale goes out as 8- or 16-bit; color as 8-bit RGB,
optionally with an alpha channel."""

from __future__ import annotations

import io

import numpy as np
from PIL import Image


def encode_gray_png(values, bit_depth=8):
    """Encode a (H, W) float array in [0,1] as grayscale PNG bytes."""
    arr = np.clip(np.asarray(values, dtype=float), 0.0, 1.0)
    if bit_depth == 8:
        img = Image.fromarray(np.round(arr * 255.0).astype(np.uint8))
    elif bit_depth == 16:
        img = Image.fromarray(np.round(arr * 65535.0).astype(np.uint16))
    else:
        raise ValueError(f"bit depth {bit_depth} not supported")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def encode_rgb_png(values, alpha=None):
    """Encode a (H, W, 3) float array in [0,1] as 8-bit RGB(A) PNG bytes.

    alpha: optional (H, W) float array in [0,1].
    """
    arr = np.clip(np.asarray(values, dtype=float), 0.0, 1.0)
    rgb = np.round(arr * 255.0).astype(np.uint8)
    if alpha is not None:
        a = np.round(np.clip(np.asarray(alpha, dtype=float), 0.0, 1.0) * 255.0)
        rgba = np.dstack([rgb, a.astype(np.uint8)])
        img = Image.fromarray(rgba, mode="RGBA")
    else:
        img = Image.fromarray(rgb, mode="RGB")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def decode_png(data):
    """Decode PNG bytes to a float array in [0,1]: (H, W) or (H, W, C)."""
    img = Image.open(io.BytesIO(data))
    if img.mode == "I;16":
        return np.asarray(img, dtype=np.float64) / 65535.0
    if img.mode in ("L", "RGB", "RGBA"):
        return np.asarray(img, dtype=np.float64) / 255.0
    if img.mode == "I":
        return np.asarray(img, dtype=np.float64) / 65535.0
    if img.mode == "1":
        return np.asarray(img, dtype=np.float64)
    return np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0


def decode_mask_png(data):
    """Decode a PNG as a boolean mask: any nonzero sample is in-region."""
    arr = decode_png(data)
    if arr.ndim == 3:
        arr = arr.max(axis=2)
    return arr > 0.0
