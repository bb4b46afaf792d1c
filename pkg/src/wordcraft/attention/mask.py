"""Regional attention mask assembly.

Block rules over the token sequence [X; T_b; T_1..T_N; D], with the derived
background region 0 participating like a region bound to the base prompt:

  X  <-> X    allowed iff both cells share a region (background included)
  X  <-> T_k  allowed iff the image cell lies in region k
  X  <-> T_b  base policy: all cells (default) or background cells only
  X  <-> D    allowed iff both grid positions share a region
  T_k <-> T_l  all-ones iff k = l, else all-zeros; T_b <-> T_k all-zeros
  T_k <-> D    all-zeros;  T_b <-> D per base policy;  D <-> D all-ones

With no regions at all the mask degenerates to dense all-ones attention.
Assembly guarantees no fully-masked query row (diagonals stay allowed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import FullyMaskedRow, LayoutMismatch

BASE_ATTENDS_ALL = "all"            # T_b interacts with every cell (default)
BASE_ATTENDS_BACKGROUND = "background"  # T_b restricted to region 0


@dataclass(frozen=True)
class AttentionMask:
    """Boolean S x S matrix; rows are queries, columns are keys."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise LayoutMismatch(f"mask must be square, got {m.shape}")
        if m.dtype != bool:
            m = m.astype(bool)
        object.__setattr__(self, "matrix", m)
        rows_ok = m.any(axis=1)
        if not rows_ok.all():
            bad = np.flatnonzero(~rows_ok)[:8].tolist()
            raise FullyMaskedRow(f"query rows with no allowed key: {bad}")

    @property
    def size(self):
        return self.matrix.shape[0]


def assemble_mask(layout, regions, base_policy=BASE_ATTENDS_ALL):
    """Build the regional attention mask for a layout and its region set."""
    if base_policy not in (BASE_ATTENDS_ALL, BASE_ATTENDS_BACKGROUND):
        raise ValueError(f"unknown base policy {base_policy!r}")
    n = layout.region_count
    if regions.count != n:
        raise LayoutMismatch(
            f"layout has {n} region span(s), region set has {regions.count}")
    if regions.grid != tuple(layout.grid):
        raise LayoutMismatch(
            f"region grid {regions.grid} != layout grid {tuple(layout.grid)}")

    s = layout.total
    if n == 0:
        return AttentionMask(np.ones((s, s), dtype=bool))

    labels = regions.labels().reshape(-1)  # cell -> region id, 0 = background
    mask = np.zeros((s, s), dtype=bool)

    xo, xl = layout.image_span
    bo, bl = layout.base_span
    do, dl = layout.depth_span
    same_region = labels[:, None] == labels[None, :]

    # image-to-image and the spatially aligned image/depth pairs
    mask[xo:xo + xl, xo:xo + xl] = same_region
    mask[xo:xo + xl, do:do + dl] = same_region
    mask[do:do + dl, xo:xo + xl] = same_region
    mask[do:do + dl, do:do + dl] = True

    # base prompt interactions
    if bl:
        base_cells = np.ones(xl, dtype=bool) if base_policy == BASE_ATTENDS_ALL \
            else labels == 0
        mask[xo:xo + xl, bo:bo + bl] = base_cells[:, None]
        mask[bo:bo + bl, xo:xo + xl] = base_cells[None, :]
        mask[do:do + dl, bo:bo + bl] = base_cells[:, None]
        mask[bo:bo + bl, do:do + dl] = base_cells[None, :]
        mask[bo:bo + bl, bo:bo + bl] = True

    # regional prompts: bound to their own cells and themselves only
    for k, (ro, rl) in enumerate(layout.region_spans, start=1):
        in_k = labels == k
        mask[xo:xo + xl, ro:ro + rl] = in_k[:, None]
        mask[ro:ro + rl, xo:xo + xl] = in_k[None, :]
        mask[ro:ro + rl, ro:ro + rl] = True

    return AttentionMask(mask)
