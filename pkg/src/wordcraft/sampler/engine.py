"""Deterministic sampling engine: generation, inversion, continuous editing.

All stepping arithmetic happens in float32 numpy so that replaying recorded
predictions is bit-exact, and so that every latent cell outside the edited
regions follows the source trajectory exactly (the blend copies the recorded
prediction there, and Euler steps are pointwise).
"""

from __future__ import annotations

import numpy as np
import torch

from ..attention import BASE_ATTENDS_ALL, regions_from_pixel_masks, resolve_regions
from ..errors import LayoutMismatch, MissingTrajectory, ShapeMismatch
from ..model import build_conditioning, vocab
from ..prompt import serialize, validate_document
from .blend import blend_noise, latent_to_pixel_mask
from .schedule import Schedule
from .trajectory import Trajectory

# which source base-prompt tokens an edit forward pass keeps
EDIT_BASE_BACKGROUND_ONLY = "background_only"  # drop foreground style words
EDIT_BASE_FULL = "full"
EDIT_BASE_NONE = "none"


def seeded_noise(shape, seed):
    gen = torch.Generator().manual_seed(int(seed) & 0x7FFFFFFFFFFFFFFF)
    return torch.randn(shape, generator=gen).numpy().astype(np.float32)


def filter_base_tokens(tokens, mode=EDIT_BASE_BACKGROUND_ONLY):
    """Source base tokens visible to an edit forward pass.

    The default drops foreground style words (patterns and colors) so the
    fresh regional prompts are not contradicted, while background words and
    free-text tokens stay."""
    if mode == EDIT_BASE_FULL:
        return list(tokens)
    if mode == EDIT_BASE_NONE:
        return []
    drop = set(vocab.PATTERNS) | set(vocab.COLORS)
    return [t for t in tokens if t not in drop]


class SamplerEngine:
    """Sampling operations bound to one loaded denoiser."""

    def __init__(self, model):
        self.model = model
        self.config = model.config

    # --- internals ---------------------------------------------------------

    def _forward_np(self, x_np, t, cond):
        x = torch.from_numpy(x_np[None])
        tt = torch.tensor([t], dtype=torch.float32)
        with torch.no_grad():
            v = self.model(x, tt, cond)
        return v[0].numpy().astype(np.float32, copy=False)

    def _conditioning(self, base_tokens, region_prompts, depth, regions,
                      base_policy):
        return build_conditioning(
            self.config, list(base_tokens), [list(p) for p in region_prompts],
            depth, regions=regions, base_policy=base_policy)

    def _check_depth(self, depth):
        depth = np.asarray(depth, dtype=np.float32)
        size = self.config.image_size
        if depth.shape != (size, size):
            raise ShapeMismatch(f"depth {depth.shape} != ({size}, {size})")
        return depth

    # --- generation ----------------------------------------------------------

    def generate(self, bundle, depth, regions=None, seed=0, schedule=None,
                 base_policy=BASE_ATTENDS_ALL):
        """Seeded Euler sampling; returns (image, trajectory)."""
        schedule = schedule or Schedule()
        depth = self._check_depth(depth)
        n_regions = 0 if regions is None else regions.count
        if bundle.region_count != n_regions:
            raise LayoutMismatch(
                f"bundle has {bundle.region_count} region prompt(s), "
                f"{n_regions} mask(s) supplied")
        if regions is None:
            regions = resolve_regions([], grid=self.config.grid)
        cond = self._conditioning(bundle.base_prompt, bundle.region_prompts,
                                  depth, regions, base_policy)

        shape = (3, self.config.image_size, self.config.image_size)
        x = seeded_noise(shape, seed)
        states = [x.copy()]
        preds = []
        for i in range(schedule.steps):
            v = self._forward_np(x, schedule.times[i], cond)
            preds.append(v)
            x = x + schedule.dt32(i) * v
            states.append(x.copy())
        traj = Trajectory(seed=seed, schedule=schedule,
                          states=np.stack(states), preds=np.stack(preds),
                          bundle_doc=serialize(bundle), depth=depth,
                          base_policy=base_policy, kind="generate")
        return traj.final_image(), traj

    # --- inversion -------------------------------------------------------------

    def invert(self, image, depth, base_prompt, schedule=None):
        """Reverse Euler ODE from the image (t=0) to noise (t=1).

        The returned trajectory is materialized by replaying the collected
        predictions forward, so the replay invariant holds bit-exactly and the
        final state reconstructs the input up to float rounding.
        """
        schedule = schedule or Schedule()
        depth = self._check_depth(depth)
        img = np.asarray(image, dtype=np.float32)
        if img.ndim == 3 and img.shape[2] == 3:
            img = img.transpose(2, 0, 1)
        size = self.config.image_size
        if img.shape != (3, size, size):
            raise ShapeMismatch(f"image {img.shape} != (3, {size}, {size})")

        from ..prompt import PromptBundle

        bundle = PromptBundle(task="global", character="?",
                              base_prompt=tuple(base_prompt) or ("<unk>",))
        regions = resolve_regions([], grid=self.config.grid)
        cond = self._conditioning(bundle.base_prompt, [], depth, regions,
                                  BASE_ATTENDS_ALL)

        n = schedule.steps
        preds = [None] * n
        y = img.copy()
        for i in range(n - 1, -1, -1):
            v = self._forward_np(y, schedule.times[i + 1], cond)
            preds[i] = v
            y = y - schedule.dt32(i) * v
        # forward materialization from the extracted noise
        states = [y.copy()]
        x = y
        for i in range(n):
            x = x + schedule.dt32(i) * preds[i]
            states.append(x.copy())
        return Trajectory(seed=-1, schedule=schedule, states=np.stack(states),
                          preds=np.stack(preds), bundle_doc=serialize(bundle),
                          depth=depth, kind="invert")

    # --- continuous editing -------------------------------------------------------

    def edit(self, source, regions, region_prompts, seed=0,
             base_policy=BASE_ATTENDS_ALL, base_tokens=EDIT_BASE_BACKGROUND_ONLY,
             per_region_pass=False):
        """Noise-blending edit against a recorded trajectory.

        Fresh seeded noise enters only inside the union of the edit regions at
        t=1; each step blends the new regional prediction into the recorded
        one, so every latent cell outside the union follows the source
        trajectory bit-exactly.
        """
        if source is None:
            raise MissingTrajectory("edit needs a source trajectory")
        if regions.count < 1 or len(region_prompts) != regions.count:
            raise LayoutMismatch(
                f"{len(region_prompts)} prompt(s) for {regions.count} region(s)")
        if regions.grid != tuple(self.config.grid):
            raise LayoutMismatch(f"regions grid {regions.grid} != "
                                 f"latent grid {tuple(self.config.grid)}")
        schedule = source.schedule
        patch = self.config.patch_size
        depth = source.depth
        source_bundle = validate_document(source.bundle_doc)
        base = filter_base_tokens(source_bundle.base_prompt, base_tokens)

        if per_region_pass:
            conds = [
                self._conditioning(
                    base, [p], depth,
                    resolve_regions([m], grid=self.config.grid), base_policy)
                for m, p in zip(regions.latent_masks, region_prompts)
            ]
        else:
            cond = self._conditioning(base, region_prompts, depth, regions,
                                      base_policy)

        union_px = latent_to_pixel_mask(regions.union(), patch)
        x = source.states[0].copy()
        fresh = seeded_noise(x.shape, seed)
        x[:, union_px] = fresh[:, union_px]

        states = [x.copy()]
        preds = []
        for i in range(schedule.steps):
            t = schedule.times[i]
            if per_region_pass:
                new_list = [self._forward_np(x, t, c) for c in conds]
            else:
                v_new = self._forward_np(x, t, cond)
                new_list = [v_new] * regions.count
            v_blend = blend_noise(source.preds[i], new_list, regions, patch)
            preds.append(v_blend)
            x = x + schedule.dt32(i) * v_blend
            states.append(x.copy())

        traj = Trajectory(
            seed=seed, schedule=schedule, states=np.stack(states),
            preds=np.stack(preds), bundle_doc=source.bundle_doc, depth=depth,
            base_policy=source.base_policy, kind="edit",
            extra={"edit_prompts": [list(p) for p in region_prompts],
                   "edit_seed": int(seed)})
        return traj.final_image(), traj

    # --- ablation baselines ----------------------------------------------------

    def edit_latent_blend_baseline(self, source, regions, region_prompts,
                                   seed=0, base_policy=BASE_ATTENDS_ALL,
                                   base_tokens=EDIT_BASE_BACKGROUND_ONLY):
        """Regenerate independently from fresh noise, then composite the final
        latents through the masks (the "blend latents, not noise" ablation)."""
        if regions.count < 1 or len(region_prompts) != regions.count:
            raise LayoutMismatch(
                f"{len(region_prompts)} prompt(s) for {regions.count} region(s)")
        schedule = source.schedule
        patch = self.config.patch_size
        source_bundle = validate_document(source.bundle_doc)
        base = filter_base_tokens(source_bundle.base_prompt, base_tokens)
        cond = self._conditioning(base, region_prompts, source.depth, regions,
                                  base_policy)
        shape = source.states[0].shape
        x = seeded_noise(shape, seed)
        for i in range(schedule.steps):
            v = self._forward_np(x, schedule.times[i], cond)
            x = x + schedule.dt32(i) * v
        out = source.final_latents.copy()
        union_px = latent_to_pixel_mask(regions.union(), patch)
        out[:, union_px] = x[:, union_px]
        return np.clip(out, 0.0, 1.0).transpose(1, 2, 0)

    def edit_inpaint_baseline(self, source, regions, region_prompts, seed=0,
                              base_policy=BASE_ATTENDS_ALL,
                              base_tokens=EDIT_BASE_BACKGROUND_ONLY):
        """Inpainting ablation: unmasked latents are re-noised from the source
        image at every step instead of reusing the recorded predictions."""
        if regions.count < 1 or len(region_prompts) != regions.count:
            raise LayoutMismatch(
                f"{len(region_prompts)} prompt(s) for {regions.count} region(s)")
        schedule = source.schedule
        patch = self.config.patch_size
        source_bundle = validate_document(source.bundle_doc)
        base = filter_base_tokens(source_bundle.base_prompt, base_tokens)
        cond = self._conditioning(base, region_prompts, source.depth, regions,
                                  base_policy)
        union_px = latent_to_pixel_mask(regions.union(), patch)
        src = source.final_latents
        gen = torch.Generator().manual_seed(int(seed) & 0x7FFFFFFFFFFFFFFF)
        x = torch.randn(src.shape, generator=gen).numpy().astype(np.float32)
        for i in range(schedule.steps):
            t = np.float32(schedule.times[i])
            eps = torch.randn(src.shape, generator=gen).numpy().astype(np.float32)
            known = (np.float32(1.0) - t) * src + t * eps
            x[:, ~union_px] = known[:, ~union_px]
            v = self._forward_np(x, schedule.times[i], cond)
            x = x + schedule.dt32(i) * v
        return np.clip(x, 0.0, 1.0).transpose(1, 2, 0)


def regions_from_pixels(pixel_masks, config):
    """Pixel masks -> RegionSet on the model's latent grid."""
    return regions_from_pixel_masks(pixel_masks, config.grid)
