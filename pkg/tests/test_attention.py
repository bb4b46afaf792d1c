import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from oracles import mask_oracle, random_layout_and_regions
from wordcraft.attention import (
    AttentionTensors,
    BASE_ATTENDS_BACKGROUND,
    TokenLayout,
    assemble_mask,
    decode_rle,
    dense_attention_reference,
    downsample_mask,
    encode_rle,
    masked_mma,
    resolve_empty,
    resolve_regions,
)
from wordcraft.errors import (
    FullyMaskedRow,
    IndivisibleDimensions,
    LayoutMismatch,
    OverlappingRegions,
    ShapeMismatch,
)

# --- downsampling / regions -------------------------------------------------


def test_downsample_all_zero():
    assert not downsample_mask(np.zeros((64, 64)), (8, 8)).any()


def test_downsample_single_pixel():
    px = np.zeros((64, 64), dtype=bool)
    px[0, 0] = True
    grid = downsample_mask(px, (8, 8))
    assert grid[0, 0]
    assert grid.sum() == 1


def test_downsample_checkerboard():
    yy, xx = np.mgrid[0:64, 0:64]
    checker = (yy + xx) % 2 == 0
    assert downsample_mask(checker, (8, 8)).all()


def test_downsample_indivisible():
    with pytest.raises(IndivisibleDimensions):
        downsample_mask(np.zeros((65, 64)), (8, 8))


def test_resolve_partition():
    left = np.zeros((8, 8), dtype=bool)
    left[:, :4] = True
    rs = resolve_regions([left, ~left])
    assert not rs.background.any()
    assert rs.count == 2


def test_resolve_empty_is_all_background():
    rs = resolve_regions([], grid=(8, 8))
    assert rs.background.all()
    assert rs.count == 0
    rs2 = resolve_empty((8, 8))
    assert np.array_equal(rs.background, rs2.background)


def test_resolve_overlap_lists_cells():
    a = np.zeros((8, 8), dtype=bool)
    b = np.zeros((8, 8), dtype=bool)
    a[3, 3] = b[3, 3] = True
    a[0, 0] = True
    with pytest.raises(OverlappingRegions) as exc:
        resolve_regions([a, b])
    assert (3, 3) in exc.value.cells


# --- layout ------------------------------------------------------------------


def test_layout_build_spans():
    lay = TokenLayout.build((2, 2), 3, [2, 1])
    assert lay.image_span == (0, 4)
    assert lay.base_span == (4, 3)
    assert lay.region_spans == ((7, 2), (9, 1))
    assert lay.depth_span == (10, 4)
    assert lay.total == 14


def test_layout_rejects_gaps():
    with pytest.raises(LayoutMismatch):
        TokenLayout(image_span=(0, 4), base_span=(5, 1), region_spans=(),
                    depth_span=(6, 4), grid=(2, 2))


def test_layout_rejects_grid_mismatch():
    with pytest.raises(LayoutMismatch):
        TokenLayout(image_span=(0, 3), base_span=(3, 0), region_spans=(),
                    depth_span=(3, 3), grid=(2, 2))


# --- mask assembly -----------------------------------------------------------


def _example_setup():
    """|X| = 4 on a 1x4 grid, regions {0,1}, {2}, background {3};
    one base token, one token per region, |D| = 4."""
    layout = TokenLayout.build((1, 4), 1, [1, 1])
    m1 = np.array([[True, True, False, False]])
    m2 = np.array([[False, False, True, False]])
    regions = resolve_regions([m1, m2])
    return layout, regions


def test_block_rules_match_published_cases():
    layout, regions = _example_setup()
    m = assemble_mask(layout, regions).matrix
    # X offsets 0..3, T_b at 4, T_1 at 5, T_2 at 6, D at 7..10
    assert m[0, 1] and not m[0, 2]          # image cells share region 1
    assert m[3, 3]                          # background cell attends itself
    assert m[0, 5] and not m[2, 5]          # X<->T_1 bound to region 1
    assert not m[5, 6]                      # T_1 <-> T_2 blocked
    assert m[7:11, 7:11].all()              # D -> D dense
    assert m[3, 4] and not m[3, 5]          # background cell: base yes, T_1 no


def test_mask_n0_is_dense():
    layout = TokenLayout.build((2, 3), 2, [])
    mask = assemble_mask(layout, resolve_empty((2, 3)))
    assert mask.matrix.all()


def test_mask_restrictive_base_policy():
    layout, regions = _example_setup()
    m = assemble_mask(layout, regions, base_policy=BASE_ATTENDS_BACKGROUND).matrix
    assert not m[0, 4]      # region-1 cell no longer sees the base prompt
    assert m[3, 4]          # background cell still does
    assert m[4, 4]          # base token keeps itself
    assert not m[4, 7] and m[4, 10]  # base<->depth restricted to background


def test_mask_count_mismatch():
    layout, _ = _example_setup()
    with pytest.raises(LayoutMismatch):
        assemble_mask(layout, resolve_empty((1, 4)))


def test_mask_matches_bruteforce_oracle():
    rng = np.random.default_rng(123)
    for _ in range(60):
        layout, regions = random_layout_and_regions(rng)
        ours = assemble_mask(layout, regions).matrix
        oracle = mask_oracle(layout, regions)
        assert np.array_equal(ours, oracle)
        ours_r = assemble_mask(layout, regions,
                               base_policy=BASE_ATTENDS_BACKGROUND).matrix
        oracle_r = mask_oracle(layout, regions, base_policy="background")
        assert np.array_equal(ours_r, oracle_r)


def test_mask_mutual_blocks():
    rng = np.random.default_rng(99)
    for _ in range(20):
        layout, regions = random_layout_and_regions(rng)
        m = assemble_mask(layout, regions).matrix
        xo, xl = layout.image_span
        do, dl = layout.depth_span
        assert np.array_equal(m[xo:xo + xl, do:do + dl],
                              m[do:do + dl, xo:xo + xl].T)
        for ro, rl in layout.region_spans:
            assert np.array_equal(m[xo:xo + xl, ro:ro + rl],
                                  m[ro:ro + rl, xo:xo + xl].T)


def test_mask_never_fully_masked_row():
    rng = np.random.default_rng(321)
    for _ in range(40):
        layout, regions = random_layout_and_regions(rng)
        m = assemble_mask(layout, regions).matrix
        assert m.any(axis=1).all()
        assert m.diagonal().all()


# --- masked attention ---------------------------------------------------------


def test_equal_logits_split_weight():
    q = np.zeros((1, 3, 4))
    k = np.zeros((1, 3, 4))
    mask = np.array([[1, 1, 0], [1, 1, 1], [1, 1, 1]], dtype=bool)
    from wordcraft.attention import masked_weights

    w = masked_weights(q, k, mask[None])
    assert np.allclose(w[0, 0], [0.5, 0.5, 0.0])
    assert w[0, 0, 2] == 0.0


def test_single_allowed_key_copies_value():
    rng = np.random.default_rng(1)
    t = AttentionTensors(*(rng.normal(size=(2, 5, 8)) for _ in range(3)))
    mask = np.ones((5, 5), dtype=bool)
    mask[1] = False
    mask[1, 0] = True
    out = masked_mma(t, mask)
    assert np.array_equal(out[:, 1, :], t.v[:, 0, :])


def test_dense_degeneration():
    rng = np.random.default_rng(2)
    for _ in range(100):
        h, s, d = rng.integers(1, 4), rng.integers(2, 12), rng.integers(1, 9)
        t = AttentionTensors(*(rng.normal(size=(h, s, d)) for _ in range(3)))
        ours = masked_mma(t, np.ones((s, s), dtype=bool))
        ref = dense_attention_reference(t.q, t.k, t.v)
        assert np.abs(ours - ref).max() <= 1e-6


def test_row_stochasticity():
    from wordcraft.attention import masked_weights

    rng = np.random.default_rng(3)
    for _ in range(50):
        s = int(rng.integers(2, 20))
        layout, regions = random_layout_and_regions(rng)
        m = assemble_mask(layout, regions).matrix
        q = rng.normal(size=(1, m.shape[0], 6))
        k = rng.normal(size=(1, m.shape[0], 6))
        w = masked_weights(q, k, m[None])
        assert np.abs(w.sum(axis=-1) - 1.0).max() < 1e-6


def test_zero_leakage_bitwise():
    rng = np.random.default_rng(4)
    for _ in range(30):
        layout, regions = random_layout_and_regions(rng)
        if layout.region_count < 2:
            continue
        m = assemble_mask(layout, regions).matrix
        s = layout.total
        t = AttentionTensors(*(rng.normal(size=(2, s, 8)) for _ in range(3)))
        base = masked_mma(t, m)
        # perturb key/value rows of every region span l != 1
        k2 = t.k.copy()
        v2 = t.v.copy()
        for l, (ro, rl) in enumerate(layout.region_spans, start=1):
            if l == 1:
                continue
            k2[:, ro:ro + rl, :] = rng.normal(size=(2, rl, 8)) * 50
            v2[:, ro:ro + rl, :] = rng.normal(size=(2, rl, 8)) * 50
        out = masked_mma(AttentionTensors(t.q, k2, v2), m)
        labels = regions.labels().reshape(-1)
        xo, xl = layout.image_span
        cells_1 = np.flatnonzero(labels == 1)
        assert np.array_equal(base[:, xo + cells_1, :], out[:, xo + cells_1, :])
        # and the attention weights from region-1 image cells onto other
        # regional prompt spans are exactly zero
        from wordcraft.attention import masked_weights

        w = masked_weights(t.q, t.k, m[None])
        for l, (ro, rl) in enumerate(layout.region_spans, start=1):
            if l == 1:
                continue
            assert (w[:, xo + cells_1, ro:ro + rl] == 0.0).all()


def test_masked_mma_rejects_fully_masked_row():
    t = AttentionTensors(*(np.zeros((1, 3, 2)),) * 3)
    mask = np.ones((3, 3), dtype=bool)
    mask[2] = False
    with pytest.raises(FullyMaskedRow):
        masked_mma(t, mask)


def test_masked_mma_shape_checks():
    t = AttentionTensors(*(np.zeros((1, 3, 2)),) * 3)
    with pytest.raises(ShapeMismatch):
        masked_mma(t, np.ones((4, 4), dtype=bool))
    with pytest.raises(ShapeMismatch):
        AttentionTensors(np.zeros((1, 3, 2)), np.zeros((1, 4, 2)), np.zeros((1, 3, 2)))


# --- RLE ----------------------------------------------------------------------


def test_rle_examples():
    mask = np.zeros((2, 4), dtype=bool)
    mask[0, 2:] = True
    text = encode_rle(mask)
    assert text == "rle:4x2:2,2,4"
    assert np.array_equal(decode_rle(text), mask)


def test_rle_starts_with_one():
    mask = np.ones((1, 3), dtype=bool)
    assert encode_rle(mask) == "rle:3x1:0,3"


def test_rle_rejects_bad_sum():
    with pytest.raises(ValueError):
        decode_rle("rle:4x2:2,2")


@given(hnp.arrays(np.bool_, (11, 7), elements=st.booleans()))
@settings(max_examples=200, deadline=None)
def test_rle_roundtrip_property(mask):
    assert np.array_equal(decode_rle(encode_rle(mask)), mask)
