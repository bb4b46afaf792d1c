"""Flow-matching training for the denoiser.

x_t = (1 - t) x_0 + t x_1 with x_0 the data image and x_1 standard normal;
the model regresses the straight-path velocity x_1 - x_0. Training uses
global prompts only: regional control is exercised purely at inference.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
import torch

from ..errors import DivergenceDetected
from . import vocab
from .denoiser import Conditioning, Denoiser


@dataclass
class TrainSettings:
    steps: int = 3000
    batch_size: int = 32
    lr: float = 2e-3
    lr_final_scale: float = 0.05
    seed: int = 0


def stack_examples(examples, dtype=torch.float32):
    """Dataset tensors: images (M,3,H,W), depth (M,H,W), token ids (M,L)."""
    images = torch.as_tensor(
        np.stack([e.image for e in examples]), dtype=dtype).permute(0, 3, 1, 2)
    depth = torch.as_tensor(np.stack([e.depth for e in examples]), dtype=dtype)
    ids = torch.tensor([vocab.encode_tokens(e.tokens) for e in examples],
                       dtype=torch.int64)
    return images.contiguous(), depth, ids


def flow_matching_loss(model, images, depth, token_ids, t, x1):
    """Mean squared velocity error for one batch (dense attention path)."""
    tb = t.reshape(-1, 1, 1, 1).to(images.dtype)
    x_t = (1.0 - tb) * images + tb * x1
    cond = Conditioning(base_ids=token_ids, region_ids=(), depth=depth, mask=None)
    v_hat = model(x_t, t, cond)
    target = x1 - images
    return ((v_hat - target) ** 2).mean()


def train(config, examples, settings=None, progress=None):
    """Deterministic training run; returns (model, loss_curve, wall_seconds)."""
    settings = settings or TrainSettings()
    model = Denoiser(config)
    model.train()
    images, depth, ids = stack_examples(examples)
    m = images.shape[0]
    if m == 0:
        raise ValueError("dataset is empty")

    gen = torch.Generator().manual_seed(settings.seed)
    opt = torch.optim.Adam(model.parameters(), lr=settings.lr)
    curve = []
    started = time.monotonic()
    for step in range(settings.steps):
        frac = step / max(settings.steps - 1, 1)
        scale = settings.lr_final_scale + (1 - settings.lr_final_scale) * 0.5 * (
            1 + math.cos(math.pi * frac))
        for group in opt.param_groups:
            group["lr"] = settings.lr * scale

        idx = torch.randint(m, (settings.batch_size,), generator=gen)
        t = torch.rand(settings.batch_size, generator=gen)
        x1 = torch.randn(
            (settings.batch_size, *images.shape[1:]), generator=gen)
        loss = flow_matching_loss(
            model, images[idx], depth[idx], ids[idx], t, x1)
        if not torch.isfinite(loss):
            raise DivergenceDetected(f"loss became {loss.item()} at step {step}")
        opt.zero_grad()
        loss.backward()
        opt.step()
        curve.append(float(loss.detach()))
        if progress and (step % 200 == 0 or step == settings.steps - 1):
            progress(step, curve[-1])
    model.eval()
    return model, curve, time.monotonic() - started
