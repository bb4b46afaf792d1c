"""Cubic Bezier primitives: degree elevation, evaluation, adaptive flattening."""

from __future__ import annotations

import numpy as np


def quadratic_to_cubic(q0, q1, q2):
    """Exact degree elevation of a quadratic Bezier to a cubic.

    Returns (c0, c1, c2, c3) tracing the identical curve:
    c1 = q0 + 2/3 (q1 - q0),  c2 = q2 + 2/3 (q1 - q2).
    """
    q0 = np.asarray(q0, dtype=float)
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    c1 = q0 + (2.0 / 3.0) * (q1 - q0)
    c2 = q2 + (2.0 / 3.0) * (q1 - q2)
    return q0, c1, c2, q2


def line_to_cubic(p0, p1):
    """Straight segment as a cubic with control points at the third points."""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    return p0, p0 + (p1 - p0) / 3.0, p0 + 2.0 * (p1 - p0) / 3.0, p1


def eval_cubic(seg, u):
    """Evaluate a cubic segment (4x2 array) at parameter(s) u."""
    c0, c1, c2, c3 = np.asarray(seg, dtype=float)
    u = np.asarray(u, dtype=float)[..., None]
    v = 1.0 - u
    return (v ** 3) * c0 + 3.0 * (v ** 2) * u * c1 + 3.0 * v * (u ** 2) * c2 + (u ** 3) * c3


def eval_quadratic(q0, q1, q2, u):
    q0, q1, q2 = (np.asarray(p, dtype=float) for p in (q0, q1, q2))
    u = np.asarray(u, dtype=float)[..., None]
    v = 1.0 - u
    return (v ** 2) * q0 + 2.0 * v * u * q1 + (u ** 2) * q2


def _split_cubic(seg):
    """de Casteljau split at t = 0.5."""
    c0, c1, c2, c3 = seg
    m01 = (c0 + c1) * 0.5
    m12 = (c1 + c2) * 0.5
    m23 = (c2 + c3) * 0.5
    m012 = (m01 + m12) * 0.5
    m123 = (m12 + m23) * 0.5
    mid = (m012 + m123) * 0.5
    return (c0, m01, m012, mid), (mid, m123, m23, c3)


def _is_flat(seg, tol):
    """Control-polygon distance to the chord bounds the curve's deviation."""
    c0, c1, c2, c3 = seg
    d = c3 - c0
    n = np.hypot(d[0], d[1])
    if n < 1e-12:
        # degenerate chord: fall back to control-point spread
        return max(np.hypot(*(c1 - c0)), np.hypot(*(c2 - c0))) <= tol
    # perpendicular distance of inner control points to the chord line
    d1 = abs(d[0] * (c1[1] - c0[1]) - d[1] * (c1[0] - c0[0])) / n
    d2 = abs(d[0] * (c2[1] - c0[1]) - d[1] * (c2[0] - c0[0])) / n
    return max(d1, d2) <= tol


def flatten_cubic(seg, tol, _depth=0):
    """Adaptively flatten one cubic to a polyline point list (excluding the
    start point). Deviation from the true curve is at most `tol`."""
    seg = tuple(np.asarray(p, dtype=float) for p in seg)
    if _depth >= 24 or _is_flat(seg, tol):
        return [seg[3]]
    left, right = _split_cubic(seg)
    pts = flatten_cubic(left, tol, _depth + 1)
    pts.extend(flatten_cubic(right, tol, _depth + 1))
    return pts


def flatten_contour(segments, tol):
    """Flatten a closed contour (list of 4x2 cubics) to a closed polyline.

    Returns an (n, 2) array whose last point equals the first.
    """
    if len(segments) == 0:
        return np.zeros((0, 2))
    pts = [np.asarray(segments[0][0], dtype=float)]
    for seg in segments:
        pts.extend(flatten_cubic(seg, tol))
    return np.asarray(pts)
