"""Pseudo-depth: normalized exact Euclidean distance transform of the glyph
interior. Stands in for a monocular depth estimate of embossed text."""

from __future__ import annotations

import numpy as np

from .raster import DepthMap


def _dt1d_sq(f):
    """Exact 1D squared-distance transform (lower envelope of parabolas).

    f holds squared distances. All arithmetic stays on integers representable
    in float64, so results are exact.
    """
    n = f.size
    d = np.empty(n)
    v = np.zeros(n, dtype=np.int64)
    z = np.empty(n + 1)
    k = 0
    z[0] = -np.inf
    z[1] = np.inf
    for q in range(1, n):
        fq = f[q] + q * q
        while True:
            p = v[k]
            s = (fq - (f[p] + p * p)) / (2.0 * q - 2.0 * p)
            if s <= z[k]:
                k -= 1
            else:
                break
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = np.inf
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        p = v[k]
        d[q] = (q - p) * (q - p) + f[p]
    return d


def exact_edt_sq(interior):
    """Exact squared Euclidean distance from every cell to the nearest cell
    OUTSIDE `interior` (pixel-center metric). Outside cells get 0; if no
    outside cell exists the result is +inf everywhere.
    """
    interior = np.asarray(interior, dtype=bool)
    if not (~interior).any():
        return np.full(interior.shape, np.inf)
    h, w = interior.shape
    # vertical pass: per-column distance (in rows) to the nearest outside
    # cell, by a forward/backward sweep; columns with no outside cell get a
    # sentinel larger than any true distance
    big = float(h + w)
    g = np.where(interior, big, 0.0)
    for i in range(1, h):
        g[i] = np.minimum(g[i], g[i - 1] + 1.0)
    for i in range(h - 2, -1, -1):
        g[i] = np.minimum(g[i], g[i + 1] + 1.0)
    g = np.minimum(g, big) ** 2
    # horizontal pass: parabola envelope over the squared column distances.
    # big^2 exceeds (h-1)^2 + (w-1)^2, so all-inside columns never win.
    d = np.empty_like(g)
    for i in range(h):
        d[i, :] = _dt1d_sq(g[i, :])
    return d


def depth_from_coverage(coverage):
    """Normalized distance transform of {coverage > 0.5}.

    Zero on every uncovered pixel; maximum exactly 1 whenever the interior is
    non-empty.
    """
    cov = coverage.values if hasattr(coverage, "values") else np.asarray(coverage)
    interior = cov > 0.5
    if not interior.any():
        return DepthMap(np.zeros_like(cov, dtype=float))
    d_sq = exact_edt_sq(interior)
    if np.isinf(d_sq).all():
        # no exterior at all: uniform full depth
        return DepthMap(np.ones_like(cov, dtype=float))
    d = np.sqrt(d_sq)
    return DepthMap(d / d.max())
