"""Denoiser, style vocabulary, synthetic dataset, training, checkpoints."""

from . import vocab
from .checkpoint import (
    checkpoint_digest,
    load_checkpoint,
    model_from_checkpoint,
    read_checkpoint,
    save_checkpoint,
    write_checkpoint,
)
from .config import DenoiserConfig
from .dataset import (
    GlyphSpec,
    PROCEDURAL_SHAPES,
    TrainingExample,
    builtin_glyph_set,
    render_target,
    synth_dataset,
)
from .denoiser import (
    Conditioning,
    Denoiser,
    build_conditioning,
    dense_attention,
    patchify,
    time_embedding,
    unpatchify,
)
from .train import TrainSettings, flow_matching_loss, stack_examples, train

__all__ = [
    "Conditioning",
    "Denoiser",
    "DenoiserConfig",
    "GlyphSpec",
    "PROCEDURAL_SHAPES",
    "TrainSettings",
    "TrainingExample",
    "build_conditioning",
    "builtin_glyph_set",
    "checkpoint_digest",
    "dense_attention",
    "flow_matching_loss",
    "load_checkpoint",
    "model_from_checkpoint",
    "patchify",
    "read_checkpoint",
    "render_target",
    "save_checkpoint",
    "stack_examples",
    "synth_dataset",
    "time_embedding",
    "train",
    "unpatchify",
    "vocab",
    "write_checkpoint",
]
