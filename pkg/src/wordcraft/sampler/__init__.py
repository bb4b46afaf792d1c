"""Sampling: schedules, trajectories, generation, inversion, noise-blending
edits, ablation baselines, and evaluation metrics."""

from .blend import blend_noise, latent_to_pixel_mask
from .engine import (
    EDIT_BASE_BACKGROUND_ONLY,
    EDIT_BASE_FULL,
    EDIT_BASE_NONE,
    SamplerEngine,
    filter_base_tokens,
    regions_from_pixels,
    seeded_noise,
)
from .metrics import (
    boundary_ring,
    boundary_seam_metric,
    global_style_accuracy,
    psnr,
    region_style_accuracy,
    style_record,
)
from .schedule import DEFAULT_STEPS, Schedule
from .trajectory import Trajectory

__all__ = [
    "DEFAULT_STEPS",
    "EDIT_BASE_BACKGROUND_ONLY",
    "EDIT_BASE_FULL",
    "EDIT_BASE_NONE",
    "SamplerEngine",
    "Schedule",
    "Trajectory",
    "blend_noise",
    "boundary_ring",
    "boundary_seam_metric",
    "filter_base_tokens",
    "global_style_accuracy",
    "latent_to_pixel_mask",
    "psnr",
    "region_style_accuracy",
    "regions_from_pixels",
    "seeded_noise",
    "style_record",
]
