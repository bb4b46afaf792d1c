"""Scanline rasterization of cubic-Bezier outlines, nonzero-winding fill.

Anti-aliasing is plain supersampling: supersample^2 point samples per pixel,
box-averaged. Curves are flattened adaptively to polylines in subpixel space
with max deviation FLATTEN_TOL subpixels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidDimensions
from .bezier import flatten_contour

FLATTEN_TOL = 0.25  # subpixels
DEFAULT_SUPERSAMPLE = 4


@dataclass(frozen=True)
class RasterImage:
    """Row-major image, origin top-left, values in [0, 1].

    values: (height, width) for 1 channel, (height, width, 3) for color.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim == 2:
            pass
        elif arr.ndim == 3 and arr.shape[2] == 3:
            pass
        else:
            raise InvalidDimensions(f"bad image shape {arr.shape}")
        if arr.size == 0:
            raise InvalidDimensions("empty image")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("image values outside [0, 1]")
        object.__setattr__(self, "values", arr)

    @property
    def height(self):
        return self.values.shape[0]

    @property
    def width(self):
        return self.values.shape[1]

    @property
    def channels(self):
        return 1 if self.values.ndim == 2 else self.values.shape[2]


@dataclass(frozen=True)
class DepthMap:
    """Normalized interior-distance map: 0 outside the shape, max 1 inside."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 2 or arr.size == 0:
            raise InvalidDimensions(f"bad depth shape {arr.shape}")
        object.__setattr__(self, "values", arr)

    @property
    def height(self):
        return self.values.shape[0]

    @property
    def width(self):
        return self.values.shape[1]


def _edges_from_contours(outline, width, height, ss):
    """Flatten contours into an edge array in subpixel coordinates.

    Em space maps to the full canvas with the y axis flipped (origin top-left).
    Returns (x0, y0, x1, y1) arrays of non-horizontal edges.
    """
    xs0, ys0, xs1, ys1 = [], [], [], []
    for contour in outline.contours:
        # em -> subpixel before flattening so the tolerance is exact:
        # x right, y down
        sub = np.empty_like(contour)
        sub[..., 0] = contour[..., 0] * width * ss
        sub[..., 1] = (1.0 - contour[..., 1]) * height * ss
        pts = flatten_contour(sub, FLATTEN_TOL)
        if len(pts) < 2:
            continue
        xs0.append(pts[:-1, 0])
        ys0.append(pts[:-1, 1])
        xs1.append(pts[1:, 0])
        ys1.append(pts[1:, 1])
    if not xs0:
        return None
    x0 = np.concatenate(xs0)
    y0 = np.concatenate(ys0)
    x1 = np.concatenate(xs1)
    y1 = np.concatenate(ys1)
    keep = y0 != y1
    return x0[keep], y0[keep], x1[keep], y1[keep]


def rasterize(outline, width, height, supersample=DEFAULT_SUPERSAMPLE):
    """Nonzero-winding coverage of an outline on a width x height canvas."""
    if width <= 0 or height <= 0:
        raise InvalidDimensions(f"canvas {width}x{height}")
    if supersample < 1:
        raise InvalidDimensions(f"supersample {supersample}")
    ss = int(supersample)
    if outline.is_empty:
        return RasterImage(np.zeros((height, width)))

    edges = _edges_from_contours(outline, width, height, ss)
    if edges is None:
        return RasterImage(np.zeros((height, width)))
    x0, y0, x1, y1 = edges
    # orient all edges upward in scan space, remembering winding direction
    wind = np.where(y1 > y0, 1, -1)
    ylo = np.minimum(y0, y1)
    yhi = np.maximum(y0, y1)
    xlo = np.where(y1 > y0, x0, x1)
    slope = (x1 - x0) / (y1 - y0)

    wss, hss = width * ss, height * ss
    sub = np.zeros((hss, wss), dtype=np.int32)
    diff = np.empty(wss + 1, dtype=np.int64)
    for row in range(hss):
        yc = row + 0.5
        m = (ylo <= yc) & (yc < yhi)
        if not m.any():
            continue
        xc = xlo[m] + (yc - ylo[m]) * slope[m]
        order = np.argsort(xc, kind="stable")
        xc = xc[order]
        w = np.cumsum(wind[m][order])
        # spans between consecutive crossings where winding is nonzero
        active = w[:-1] != 0
        if not active.any():
            continue
        xa = xc[:-1][active]
        xb = xc[1:][active]
        i0 = np.clip(np.ceil(xa - 0.5).astype(np.int64), 0, wss)
        i1 = np.clip(np.ceil(xb - 0.5).astype(np.int64), 0, wss)
        ok = i1 > i0
        if not ok.any():
            continue
        diff[:] = 0
        np.add.at(diff, i0[ok], 1)
        np.add.at(diff, i1[ok], -1)
        sub[row] = np.cumsum(diff[:-1]) > 0

    coverage = sub.reshape(height, ss, width, ss).mean(axis=(1, 3))
    return RasterImage(coverage)


def compose_word(glyphs, width, height, margin=0.05, supersample=DEFAULT_SUPERSAMPLE):
    """Lay glyphs out left-to-right by advance width, fit to the canvas, and
    rasterize jointly.

    margin is a fraction of the canvas edge kept clear on every side.
    """
    if width <= 0 or height <= 0:
        raise InvalidDimensions(f"canvas {width}x{height}")
    if not glyphs:
        raise InvalidDimensions("no glyphs")

    placed = []
    pen = 0.0
    for g in glyphs:
        placed.append(g.transformed(dx=pen))
        pen += g.advance_width

    boxes = [g.bbox() for g in placed if not g.is_empty]
    if not boxes:
        return RasterImage(np.zeros((height, width)))
    xmin = min(b[0] for b in boxes)
    ymin = min(b[1] for b in boxes)
    xmax = max(b[2] for b in boxes)
    ymax = max(b[3] for b in boxes)
    span_x = max(xmax - xmin, 1e-9)
    span_y = max(ymax - ymin, 1e-9)

    # uniform scale into the margin-inset unit window, centered
    inset = 1.0 - 2.0 * margin
    scale = inset * min(1.0 / span_x, 1.0 / span_y)
    ox = 0.5 - scale * (xmin + xmax) / 2.0
    oy = 0.5 - scale * (ymin + ymax) / 2.0

    contours = []
    for g in placed:
        for c in g.contours:
            contours.append(c * scale + np.array([ox, oy]))
    from .outline import GlyphOutline

    word = GlyphOutline(contours=contours, advance_width=pen * scale)
    return rasterize(word, width, height, supersample)
