"""Regional attention: token layout, region masks, mask assembly, masked MMA."""

from .layout import TokenLayout
from .mask import (
    BASE_ATTENDS_ALL,
    BASE_ATTENDS_BACKGROUND,
    AttentionMask,
    assemble_mask,
)
from .mma import AttentionTensors, dense_attention_reference, masked_mma, masked_weights
from .regions import (
    RegionSet,
    downsample_mask,
    regions_from_pixel_masks,
    resolve_empty,
    resolve_regions,
)
from .rle import decode_rle, encode_rle

__all__ = [
    "AttentionMask",
    "AttentionTensors",
    "BASE_ATTENDS_ALL",
    "BASE_ATTENDS_BACKGROUND",
    "RegionSet",
    "TokenLayout",
    "assemble_mask",
    "decode_rle",
    "dense_attention_reference",
    "downsample_mask",
    "encode_rle",
    "masked_mma",
    "masked_weights",
    "regions_from_pixel_masks",
    "resolve_empty",
    "resolve_regions",
]
