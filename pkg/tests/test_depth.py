import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from wordcraft.glyph import depth_from_coverage, exact_edt_sq
from wordcraft.glyph.raster import RasterImage


def brute_force_edt_sq(interior):
    """O(n^2) all-pairs squared distance to the nearest outside cell."""
    h, w = interior.shape
    out = np.zeros((h, w))
    outside = np.argwhere(~interior)
    if outside.size == 0:
        return np.full((h, w), np.inf)
    for i in range(h):
        for j in range(w):
            if interior[i, j]:
                d = (outside[:, 0] - i) ** 2 + (outside[:, 1] - j) ** 2
                out[i, j] = d.min()
    return out


def test_all_zero_coverage():
    d = depth_from_coverage(RasterImage(np.zeros((8, 8))))
    assert (d.values == 0).all()


def test_filled_disk_center_is_one():
    yy, xx = np.mgrid[0:33, 0:33]
    disk = ((yy - 16) ** 2 + (xx - 16) ** 2 <= 14 ** 2).astype(float)
    d = depth_from_coverage(RasterImage(disk))
    assert d.values[16, 16] == 1.0
    assert d.values.max() == 1.0
    assert (d.values[disk == 0] == 0).all()


def test_bar_profile_matches_brute_force():
    cov = np.zeros((7, 11))
    cov[3, 3:8] = 1.0  # 5x1 interior bar
    d = depth_from_coverage(RasterImage(cov))
    oracle = np.sqrt(brute_force_edt_sq(cov > 0.5))
    oracle = oracle / oracle.max()
    assert np.array_equal(d.values, oracle)
    # every bar pixel touches the exterior: profile is flat 1
    assert (d.values[3, 3:8] == 1.0).all()


def test_edt_exact_on_random_grids():
    rng = np.random.default_rng(5)
    for _ in range(25):
        interior = rng.random((16, 16)) < rng.uniform(0.2, 0.9)
        ours = exact_edt_sq(interior)
        oracle = brute_force_edt_sq(interior)
        assert np.array_equal(ours, oracle)


@given(
    hnp.arrays(np.bool_, (16, 16), elements=st.booleans()),
)
@settings(max_examples=60, deadline=None)
def test_edt_exact_property(interior):
    ours = exact_edt_sq(interior)
    oracle = brute_force_edt_sq(interior)
    assert np.array_equal(ours, oracle)


def test_full_canvas_interior():
    d = depth_from_coverage(RasterImage(np.ones((6, 6))))
    assert (d.values == 1.0).all()
