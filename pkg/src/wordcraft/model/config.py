"""Denoiser configuration."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from . import vocab


@dataclass(frozen=True)
class DenoiserConfig:
    image_size: int = 64
    patch_size: int = 8
    embed_dim: int = 64
    heads: int = 4
    blocks: int = 3
    vocab_size: int = vocab.vocab_size()
    time_dim: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.image_size % self.patch_size != 0:
            raise ValueError("image size must be divisible by patch size")
        if self.embed_dim % self.heads != 0:
            raise ValueError("embed dim must be divisible by head count")

    @property
    def grid(self):
        g = self.image_size // self.patch_size
        return (g, g)

    @property
    def cells(self):
        g = self.image_size // self.patch_size
        return g * g

    @property
    def patch_dim(self):
        return self.patch_size * self.patch_size * 3

    @property
    def depth_patch_dim(self):
        return self.patch_size * self.patch_size

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**{k: data[k] for k in (
            "image_size", "patch_size", "embed_dim", "heads", "blocks",
            "vocab_size", "time_dim", "seed") if k in data})
