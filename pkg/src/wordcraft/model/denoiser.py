"""Glyph-conditioned rectified-flow denoiser.

A small transformer over the concatenated sequence [X; T_b; T_1..T_N; D]:
identity patch codec in and out (no VAE), learned text-token embeddings with
no positional encoding, depth tokens aligned 1:1 with image tokens via a
shared positional table, sinusoidal time embedding driving per-block
scale/shift modulation, and masked multi-modal attention. Only the X span is
read out, as the predicted velocity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from ..errors import FullyMaskedRow, ShapeMismatch
from .config import DenoiserConfig


def patchify(images, patch):
    """(B, C, H, W) -> (B, N, patch*patch*C), lossless."""
    b, c, h, w = images.shape
    gh, gw = h // patch, w // patch
    x = images.reshape(b, c, gh, patch, gw, patch)
    x = x.permute(0, 2, 4, 3, 5, 1)  # B gh gw ph pw c
    return x.reshape(b, gh * gw, patch * patch * c)


def unpatchify(tokens, patch, channels, height, width):
    """Exact inverse of patchify."""
    b, n, d = tokens.shape
    gh, gw = height // patch, width // patch
    if n != gh * gw or d != patch * patch * channels:
        raise ShapeMismatch(f"cannot unpatchify {tokens.shape} to "
                            f"{channels}x{height}x{width} with patch {patch}")
    x = tokens.reshape(b, gh, gw, patch, patch, channels)
    x = x.permute(0, 5, 1, 3, 2, 4)
    return x.reshape(b, channels, height, width)


def time_embedding(t, dim):
    """Sinusoidal embedding of t in [0, 1], scaled to a 0..1000 range."""
    half = dim // 2
    freqs = torch.exp(
        -math.log(10000.0) * torch.arange(half, dtype=t.dtype, device=t.device) / half)
    args = t[:, None] * 1000.0 * freqs[None, :]
    return torch.cat([torch.cos(args), torch.sin(args)], dim=-1)


def dense_attention(q, k, v):
    """Unmasked reference attention path (einsum form)."""
    scale = 1.0 / math.sqrt(q.shape[-1])
    scores = torch.einsum("bhid,bhjd->bhij", q, k) * scale
    weights = scores.softmax(dim=-1)
    return torch.einsum("bhij,bhjd->bhid", weights, v)


@dataclass
class Conditioning:
    """Per-call conditioning: token ids, depth map, attention mask, spans.

    base_ids: (B, Lb) int64, Lb may be 0. region_ids: tuple of (B, Lk).
    depth: (B, H, W) float. mask: (S, S) bool tensor or None for the dense
    path.
    """

    base_ids: torch.Tensor
    region_ids: tuple
    depth: torch.Tensor
    mask: torch.Tensor | None = None
    layout: object = None

    @property
    def token_count(self):
        return self.base_ids.shape[1] + sum(r.shape[1] for r in self.region_ids)


class Block(nn.Module):
    """Pre-norm transformer block with time-conditioned scale/shift."""

    def __init__(self, dim, heads):
        super().__init__()
        self.heads = heads
        self.norm1 = nn.LayerNorm(dim, elementwise_affine=False)
        self.qkv = nn.Linear(dim, 3 * dim)
        self.proj = nn.Linear(dim, dim)
        self.norm2 = nn.LayerNorm(dim, elementwise_affine=False)
        self.mlp = nn.Sequential(
            nn.Linear(dim, 4 * dim), nn.GELU(), nn.Linear(4 * dim, dim))

    def _attention(self, x, mask):
        b, s, d = x.shape
        dk = d // self.heads
        qkv = self.qkv(x).reshape(b, s, 3, self.heads, dk).permute(2, 0, 3, 1, 4)
        q, k, v = qkv[0], qkv[1], qkv[2]
        if mask is None:
            out = dense_attention(q, k, v)
        else:
            scores = (q @ k.transpose(-1, -2)) / math.sqrt(dk)
            scores = scores.masked_fill(~mask[None, None], float("-inf"))
            out = scores.softmax(dim=-1) @ v
        return self.proj(out.permute(0, 2, 1, 3).reshape(b, s, d))

    def forward(self, x, mod, mask):
        shift1, scale1, shift2, scale2 = mod
        h = self.norm1(x) * (1 + scale1[:, None, :]) + shift1[:, None, :]
        x = x + self._attention(h, mask)
        h = self.norm2(x) * (1 + scale2[:, None, :]) + shift2[:, None, :]
        return x + self.mlp(h)


class Denoiser(nn.Module):
    def __init__(self, config: DenoiserConfig):
        super().__init__()
        self.config = config
        d = config.embed_dim
        self.patch_proj = nn.Linear(config.patch_dim, d)
        self.depth_proj = nn.Linear(config.depth_patch_dim, d)
        self.token_emb = nn.Embedding(config.vocab_size, d)
        self.pos_emb = nn.Parameter(torch.zeros(config.cells, d))
        # one learned vector per token kind (image/text/depth): lets queries
        # route to the sparse text span long before content features form
        self.type_emb = nn.Parameter(torch.zeros(3, d))
        self.time_trunk = nn.Sequential(
            nn.Linear(config.time_dim, 4 * d), nn.SiLU())
        # per-block scale/shift pairs plus one pair for the final norm
        self.mod_proj = nn.Linear(4 * d, (config.blocks * 4 + 2) * d)
        # time-scaled pointwise skip from x_t to the velocity: the velocity
        # target is (x_t - x_0)/t, and the x_t part cannot survive the lossy
        # patch-to-token projection, so it bypasses the transformer entirely.
        # Pointwise per cell, so regional zero-leakage is untouched.
        self.skip_proj = nn.Linear(4 * d, config.patch_dim)
        self.transformer = nn.ModuleList(
            Block(d, config.heads) for _ in range(config.blocks))
        self.final_norm = nn.LayerNorm(d, elementwise_affine=False)
        self.head = nn.Linear(d, config.patch_dim)
        self.reset_parameters()

    def reset_parameters(self):
        """Deterministic init from config.seed; output head starts at zero."""
        gen = torch.Generator().manual_seed(self.config.seed)

        def init_linear(m, std=0.02):
            with torch.no_grad():
                m.weight.copy_(torch.randn(m.weight.shape, generator=gen) * std)
                if m.bias is not None:
                    m.bias.zero_()

        for module in (self.patch_proj, self.depth_proj):
            init_linear(module)
        with torch.no_grad():
            self.token_emb.weight.copy_(
                torch.randn(self.token_emb.weight.shape, generator=gen) * 0.02)
            self.pos_emb.copy_(
                torch.randn(self.pos_emb.shape, generator=gen) * 0.02)
            self.type_emb.copy_(
                torch.randn(self.type_emb.shape, generator=gen) * 0.02)
        init_linear(self.time_trunk[0])
        init_linear(self.mod_proj)
        for blk in self.transformer:
            init_linear(blk.qkv)
            init_linear(blk.proj)
            init_linear(blk.mlp[0])
            init_linear(blk.mlp[2])
        with torch.no_grad():
            # zero output projection and zero skip: the model starts at v = 0
            self.head.weight.zero_()
            self.head.bias.zero_()
            self.skip_proj.weight.zero_()
            self.skip_proj.bias.zero_()

    # --- sequence assembly -------------------------------------------------

    def _check_shapes(self, x_t, cond):
        c = self.config
        if x_t.ndim != 4 or x_t.shape[1:] != (3, c.image_size, c.image_size):
            raise ShapeMismatch(f"x_t shape {tuple(x_t.shape)} != "
                                f"(B, 3, {c.image_size}, {c.image_size})")
        if cond.depth.shape[-2:] != (c.image_size, c.image_size):
            raise ShapeMismatch(f"depth shape {tuple(cond.depth.shape)}")

    def _sequence(self, x_t, cond):
        c = self.config
        x = self.patch_proj(patchify(x_t, c.patch_size)) + self.pos_emb \
            + self.type_emb[0]
        parts = [x]
        if cond.base_ids.shape[1]:
            parts.append(self.token_emb(cond.base_ids) + self.type_emb[1])
        for ids in cond.region_ids:
            parts.append(self.token_emb(ids) + self.type_emb[1])
        depth = cond.depth
        if depth.ndim == 3:
            depth = depth[:, None, :, :]
        d_tok = self.depth_proj(patchify(depth, c.patch_size)) + self.pos_emb \
            + self.type_emb[2]
        parts.append(d_tok)
        return torch.cat(parts, dim=1)

    def forward(self, x_t, t, cond):
        """Predicted velocity, same shape as x_t."""
        self._check_shapes(x_t, cond)
        c = self.config
        seq = self._sequence(x_t, cond)
        s = seq.shape[1]
        mask = cond.mask
        if mask is not None:
            if mask.shape != (s, s):
                raise ShapeMismatch(f"mask {tuple(mask.shape)} != ({s}, {s})")
            if not mask.any(dim=1).all():
                raise FullyMaskedRow("attention mask has an empty query row")
        if t.ndim == 0:
            t = t.expand(x_t.shape[0])
        tf = self.time_trunk(time_embedding(t.to(seq.dtype), c.time_dim))
        mods = self.mod_proj(tf).reshape(t.shape[0], c.blocks * 4 + 2, c.embed_dim)
        for i, blk in enumerate(self.transformer):
            seq = blk(seq, mods[:, 4 * i:4 * i + 4].unbind(dim=1), mask)
        f_shift, f_scale = mods[:, -2], mods[:, -1]
        h = self.final_norm(seq[:, :c.cells])
        h = h * (1 + f_scale[:, None, :]) + f_shift[:, None, :]
        out = self.head(h)
        out = out + self.skip_proj(tf)[:, None, :] * patchify(x_t, c.patch_size)
        return unpatchify(out, c.patch_size, 3, c.image_size, c.image_size)

    def forward_dense(self, x_t, t, cond):
        """Dedicated dense path: same weights, no mask machinery anywhere."""
        cond = Conditioning(base_ids=cond.base_ids, region_ids=cond.region_ids,
                            depth=cond.depth, mask=None, layout=cond.layout)
        return self.forward(x_t, t, cond)

    def parameter_blobs(self):
        """Named float32 numpy views of every parameter, for checkpointing."""
        return {name: p.detach().cpu().numpy().astype(np.float32, copy=True)
                for name, p in self.named_parameters()}

    def load_parameter_blobs(self, blobs):
        params = dict(self.named_parameters())
        if set(params) != set(blobs):
            missing = set(params) ^ set(blobs)
            raise ShapeMismatch(f"checkpoint tensor names mismatch: {missing}")
        with torch.no_grad():
            for name, arr in blobs.items():
                tensor = torch.from_numpy(np.asarray(arr))
                if tuple(tensor.shape) != tuple(params[name].shape):
                    raise ShapeMismatch(
                        f"{name}: checkpoint {tuple(tensor.shape)} != "
                        f"model {tuple(params[name].shape)}")
                params[name].copy_(tensor.to(params[name].dtype))


def build_conditioning(config, base_tokens, region_token_lists, depth_values,
                       regions=None, base_policy=None, dtype=torch.float32,
                       batch=1):
    """Assemble Conditioning (ids, depth tensor, layout, mask) for one call.

    regions: RegionSet or None for the dense/global path. Token lists are
    encoded through the engine vocabulary (unknown words map to UNK).
    """
    from ..attention import BASE_ATTENDS_ALL, TokenLayout, assemble_mask
    from . import vocab

    base_ids = torch.tensor([vocab.encode_tokens(base_tokens)] * batch,
                            dtype=torch.int64).reshape(batch, len(base_tokens))
    region_ids = tuple(
        torch.tensor([vocab.encode_tokens(toks)] * batch,
                     dtype=torch.int64).reshape(batch, len(toks))
        for toks in region_token_lists)
    depth = torch.as_tensor(np.asarray(depth_values), dtype=dtype)
    if depth.ndim == 2:
        depth = depth[None].expand(batch, *depth.shape)

    layout = TokenLayout.build(
        config.grid, len(base_tokens), [len(t) for t in region_token_lists])
    mask_tensor = None
    if regions is not None and regions.count > 0:
        policy = base_policy or BASE_ATTENDS_ALL
        mask = assemble_mask(layout, regions, base_policy=policy)
        mask_tensor = torch.from_numpy(mask.matrix)
    return Conditioning(base_ids=base_ids, region_ids=region_ids, depth=depth,
                        mask=mask_tensor, layout=layout)
