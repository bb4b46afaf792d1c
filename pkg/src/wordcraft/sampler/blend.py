"""Per-step noise blending: edited regions take the freshly predicted values,
everything else keeps the recorded original prediction.

blend = (1 - union(regions)) * old + sum_k region_k * new_k, evaluated as
masked assignment so unedited cells are bit-identical to `old`. Masks live on
the latent grid and broadcast over whole pixel patches.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeMismatch


def latent_to_pixel_mask(latent_mask, patch):
    """Broadcast a latent-grid mask over its pixel patches."""
    latent_mask = np.asarray(latent_mask, dtype=bool)
    return np.kron(latent_mask, np.ones((patch, patch), dtype=bool))


def blend_noise(old, new_per_region, regions, patch):
    """Masked pointwise combination of predictions.

    old: (3, H, W); new_per_region: one (3, H, W) array per region (they may
    all alias one array when a single regional pass produced them); regions:
    RegionSet at latent resolution; patch: pixel size of a latent cell.
    """
    old = np.asarray(old)
    if len(new_per_region) != regions.count:
        raise ShapeMismatch(
            f"{len(new_per_region)} prediction(s) for {regions.count} region(s)")
    out = old.copy()
    for mask, new in zip(regions.latent_masks, new_per_region):
        new = np.asarray(new)
        if new.shape != old.shape:
            raise ShapeMismatch(f"prediction shape {new.shape} != {old.shape}")
        px = latent_to_pixel_mask(mask, patch)
        if px.shape != old.shape[-2:]:
            raise ShapeMismatch(
                f"mask pixels {px.shape} do not cover latents {old.shape[-2:]}")
        out[..., px] = new[..., px]
    return out
