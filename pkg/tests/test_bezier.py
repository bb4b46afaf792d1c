import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from wordcraft.glyph import eval_cubic, eval_quadratic, quadratic_to_cubic
from wordcraft.glyph.bezier import flatten_contour, line_to_cubic


def test_degree_elevation_known_values():
    c0, c1, c2, c3 = quadratic_to_cubic((0, 0), (1, 2), (2, 0))
    assert np.allclose(c0, (0, 0))
    assert np.allclose(c1, (2 / 3, 4 / 3))
    assert np.allclose(c2, (4 / 3, 4 / 3))
    assert np.allclose(c3, (2, 0))


def test_degree_elevation_degenerate_point():
    segs = quadratic_to_cubic((1, 1), (1, 1), (1, 1))
    for p in segs:
        assert np.allclose(p, (1, 1))


def test_degree_elevation_collinear():
    c0, c1, c2, c3 = quadratic_to_cubic((0, 0), (1, 0), (2, 0))
    assert np.allclose(c0, (0, 0))
    assert np.allclose(c1, (2 / 3, 0))
    assert np.allclose(c2, (4 / 3, 0))
    assert np.allclose(c3, (2, 0))
    assert c1[1] == c2[1] == 0.0


def test_degree_elevation_preserves_curve_fuzz():
    # 100 random quadratics x 100 parameters, pointwise deviation < 1e-9
    rng = np.random.default_rng(7)
    for _ in range(100):
        q = rng.uniform(-2, 2, size=(3, 2))
        cubic = np.stack(quadratic_to_cubic(*q))
        u = rng.uniform(0, 1, size=100)
        on_quad = eval_quadratic(q[0], q[1], q[2], u)
        on_cubic = eval_cubic(cubic, u)
        assert np.abs(on_quad - on_cubic).max() < 1e-9


coords = st.floats(min_value=-10, max_value=10, allow_nan=False)


@given(st.tuples(*[coords] * 6), st.floats(min_value=0, max_value=1))
@settings(max_examples=200, deadline=None)
def test_degree_elevation_property(flat, u):
    q = np.array(flat).reshape(3, 2)
    cubic = np.stack(quadratic_to_cubic(*q))
    dev = np.abs(eval_quadratic(q[0], q[1], q[2], [u]) - eval_cubic(cubic, [u]))
    assert dev.max() < 1e-9


def test_line_to_cubic_stays_on_line():
    seg = np.stack(line_to_cubic((0, 0), (3, 6)))
    u = np.linspace(0, 1, 17)
    pts = eval_cubic(seg, u)
    assert np.allclose(pts[:, 1], 2 * pts[:, 0])


def _point_to_segments(points, a, b):
    """Min distance of each point to any segment (a[i], b[i])."""
    ab = b - a
    denom = (ab ** 2).sum(-1)
    denom = np.where(denom == 0, 1.0, denom)
    ap = points[:, None, :] - a[None, :, :]
    t = np.clip((ap * ab[None, :, :]).sum(-1) / denom[None, :], 0.0, 1.0)
    proj = a[None, :, :] + t[..., None] * ab[None, :, :]
    d = np.sqrt(((points[:, None, :] - proj) ** 2).sum(-1))
    return d.min(axis=1)


def test_flatten_deviation_bound():
    # flattened polyline stays within tolerance of the true curve
    seg = np.array([[0, 0], [0.4, 1.2], [1.3, 1.1], [2, 0]], dtype=float)
    tol = 0.01
    pts = flatten_contour(np.stack([seg, seg[::-1]]), tol)
    dense = eval_cubic(seg, np.linspace(0, 1, 2000))
    min_dist = _point_to_segments(dense, pts[:-1], pts[1:])
    assert min_dist.max() < tol * 1.5  # flatness test bounds control polygon
