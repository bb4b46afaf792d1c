"""Region sets: pixel masks, latent downsampling, disjointness, background."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import IndivisibleDimensions, OverlappingRegions, ShapeMismatch


def downsample_mask(pixel_mask, grid):
    """Any-coverage downsampling: a latent cell is set iff any pixel in its
    patch is set."""
    mask = np.asarray(pixel_mask)
    if mask.dtype != bool:
        mask = mask > 0.5 if mask.dtype.kind == "f" else mask.astype(bool)
    rows, cols = grid
    h, w = mask.shape
    if h % rows != 0 or w % cols != 0:
        raise IndivisibleDimensions(
            f"pixel mask {h}x{w} not divisible by grid {rows}x{cols}")
    ph, pw = h // rows, w // cols
    return mask.reshape(rows, ph, cols, pw).any(axis=(1, 3))


@dataclass(frozen=True)
class RegionSet:
    """Pairwise-disjoint latent region masks plus the derived background.

    latent_masks: tuple of (rows, cols) boolean arrays for regions 1..N.
    background: boolean complement of their union.
    pixel_masks: optional matching pixel-resolution masks (kept for exports).
    """

    latent_masks: tuple
    background: np.ndarray
    pixel_masks: tuple = field(default=())

    @property
    def count(self):
        return len(self.latent_masks)

    @property
    def grid(self):
        return self.background.shape

    def labels(self):
        """Integer grid: 0 for background, k for region k (1-based)."""
        lab = np.zeros(self.background.shape, dtype=np.int64)
        for k, m in enumerate(self.latent_masks, start=1):
            lab[m] = k
        return lab

    def union(self):
        return ~self.background


def resolve_regions(masks, pixel_masks=(), grid=None):
    """Validate disjointness and derive the background region.

    masks: N >= 0 latent grids of equal shape. N = 0 yields an all-background
    region set covering `grid` (required only in that case).
    """
    grids = [np.asarray(m).astype(bool) for m in masks]
    if not grids:
        if grid is None:
            raise ShapeMismatch("N=0 needs an explicit grid shape")
        return resolve_empty(grid)
    shape = grids[0].shape
    for g in grids:
        if g.shape != shape:
            raise ShapeMismatch(f"mask shapes differ: {g.shape} vs {shape}")
    counts = np.zeros(shape, dtype=np.int64)
    for g in grids:
        counts += g
    overlap = counts > 1
    if overlap.any():
        cells = [tuple(int(v) for v in idx) for idx in np.argwhere(overlap)]
        raise OverlappingRegions(cells)
    union = counts > 0
    return RegionSet(latent_masks=tuple(grids), background=~union,
                     pixel_masks=tuple(np.asarray(p).astype(bool) for p in pixel_masks))


def resolve_empty(grid):
    """The N = 0 region set: background covers every latent cell."""
    rows, cols = grid
    return RegionSet(latent_masks=(), background=np.ones((rows, cols), dtype=bool))


def regions_from_pixel_masks(pixel_masks, grid):
    """Downsample pixel masks to the latent grid and resolve.

    Disjointness is checked at latent resolution: pixel masks that touch the
    same patch collide even if their pixels are disjoint.
    """
    if not pixel_masks:
        return resolve_empty(grid)
    latent = [downsample_mask(m, grid) for m in pixel_masks]
    return resolve_regions(latent, pixel_masks=pixel_masks)
