"""Session lifecycle: glyph preparation, generation, continuous editing,
history persistence. Per-session operations are serialized with a lock; the
engine and checkpoint are shared read-only."""

from __future__ import annotations

import base64
import io
import threading
import time
import uuid

import numpy as np

from ..attention import decode_rle, regions_from_pixel_masks, resolve_regions
from ..errors import MissingTrajectory, WordcraftError
from ..glyph import compose_word, depth_from_coverage, load_word, pngio
from ..prompt import validate_document
from ..sampler import SamplerEngine, Schedule, Trajectory, latent_to_pixel_mask
from ..sampler.schedule import DEFAULT_STEPS
from .store import ArtifactStore

PREVIEW_SIZE = 256
MAX_COUNT = 4


def prepare_glyph_images(font_bytes, text, image_size, preview_size=PREVIEW_SIZE):
    """(coverage, depth, preview_coverage_png, depth_png) for a word."""
    glyphs = load_word(font_bytes, text)
    coverage = compose_word(glyphs, image_size, image_size)
    depth = depth_from_coverage(coverage)
    preview = compose_word(glyphs, preview_size, preview_size)
    # the preview shows the classic black word on white
    preview_png = pngio.encode_gray_png(1.0 - preview.values)
    depth_png = pngio.encode_gray_png(depth.values, bit_depth=16)
    return coverage.values, depth.values.astype(np.float32), preview_png, depth_png


def decode_region_payload(entry, expected_shape):
    """One region mask from a request: RLE string or base64 PNG."""
    if "rle" in entry and entry["rle"]:
        mask = decode_rle(entry["rle"])
    elif "png_base64" in entry and entry["png_base64"]:
        mask = pngio.decode_mask_png(base64.b64decode(entry["png_base64"]))
    else:
        raise WordcraftError("region entry needs 'rle' or 'png_base64'")
    if mask.shape != tuple(expected_shape):
        raise WordcraftError(
            f"mask is {mask.shape[1]}x{mask.shape[0]}, expected "
            f"{expected_shape[1]}x{expected_shape[0]}")
    return mask


def _entropy_seed():
    return int.from_bytes(uuid.uuid4().bytes[:4], "big")


class SessionManager:
    def __init__(self, store: ArtifactStore, engine: SamplerEngine, fonts: dict):
        self.store = store
        self.engine = engine
        self.fonts = dict(fonts)  # name -> font bytes
        self._locks = {}
        self._locks_guard = threading.Lock()

    def _lock(self, sid):
        with self._locks_guard:
            if sid not in self._locks:
                self._locks[sid] = threading.Lock()
            return self._locks[sid]

    # --- session creation -----------------------------------------------------

    def create_session(self, document, font_name=None):
        bundle = validate_document(document)
        if font_name is None:
            font_name = next(iter(self.fonts))
        if font_name not in self.fonts:
            raise WordcraftError(f"unknown font {font_name!r}")
        size = self.engine.config.image_size
        coverage, depth, preview_png, depth_png = prepare_glyph_images(
            self.fonts[font_name], bundle.character, size)
        depth_key = self.store.put(_npy_bytes(depth), "npy")
        preview_key = self.store.put(preview_png, "png")
        depth_png_key = self.store.put(depth_png, "png")
        sid = str(uuid.uuid4())
        now = int(time.time())
        doc = {
            "id": sid,
            "created": now,
            "updated": now,
            "font": font_name,
            "bundle": _bundle_dict(bundle),
            "artifacts": {
                "glyph_png": preview_key,
                "depth_png": depth_png_key,
                "depth_npy": depth_key,
            },
            "history": [],
        }
        self.store.write_session(doc)
        return doc

    def get_session(self, sid):
        return self.store.read_session(sid)

    # --- operations -------------------------------------------------------------

    def generate(self, sid, seed=None, regions_payload=None, steps=None,
                 count=1, transparent=False):
        with self._lock(sid):
            doc = self.store.read_session(sid)
            if doc is None:
                raise KeyError(sid)
            bundle = validate_document(doc["bundle"])
            depth = _npy_load(self.store.get(doc["artifacts"]["depth_npy"]))
            config = self.engine.config
            regions = None
            if regions_payload:
                masks = [decode_region_payload(e, depth.shape)
                         for e in regions_payload]
                regions = regions_from_pixel_masks(masks, config.grid)
            schedule = Schedule(steps=int(steps) if steps else DEFAULT_STEPS)
            count = max(1, min(int(count), MAX_COUNT))
            results = []
            for i in range(count):
                used_seed = (_entropy_seed() if seed is None
                             else int(seed) + i)
                image, traj = self.engine.generate(
                    bundle, depth, regions=regions, seed=used_seed,
                    schedule=schedule)
                entry = self._append(doc, "generate", image, traj, depth,
                                     regions, transparent,
                                     {"seed": used_seed,
                                      "steps": schedule.steps,
                                      "count_index": i})
                results.append(entry)
            return doc, results

    def edit(self, sid, regions_payload, region_prompts, history_index=None,
             seed=None, transparent=False):
        with self._lock(sid):
            doc = self.store.read_session(sid)
            if doc is None:
                raise KeyError(sid)
            if not doc["history"]:
                raise MissingTrajectory("session has no generation to edit")
            if history_index is None:
                history_index = len(doc["history"]) - 1
            if not 0 <= history_index < len(doc["history"]):
                raise MissingTrajectory(f"history entry {history_index} not found")
            if not regions_payload:
                raise WordcraftError("edit requires regions")
            if len(region_prompts) != len(regions_payload):
                raise WordcraftError("one prompt list per region is required")
            source_key = doc["history"][history_index]["trajectory"]
            source = Trajectory.from_bytes(self.store.get(source_key))
            depth = source.depth
            config = self.engine.config
            masks = [decode_region_payload(e, depth.shape)
                     for e in regions_payload]
            regions = regions_from_pixel_masks(masks, config.grid)
            used_seed = _entropy_seed() if seed is None else int(seed)
            image, traj = self.engine.edit(
                source, regions, [list(p) for p in region_prompts],
                seed=used_seed)
            entry = self._append(doc, "edit", image, traj, depth, regions,
                                 transparent,
                                 {"seed": used_seed,
                                  "source_index": history_index,
                                  "region_prompts": [list(p) for p in region_prompts]})
            return doc, entry

    # --- internals ---------------------------------------------------------------

    def _append(self, doc, op, image, traj, depth, regions, transparent, params):
        alpha = None
        if transparent:
            alpha = transparency_alpha(regions, depth, self.engine.config.patch_size)
        png = pngio.encode_rgb_png(image, alpha=alpha)
        image_key = self.store.put(png, "png")
        traj_key = self.store.put(traj.to_bytes(), "wctj")
        entry = {
            "index": len(doc["history"]),
            "op": op,
            "params": params,
            "image": image_key,
            "trajectory": traj_key,
            "transparent": bool(transparent),
            "timestamp": int(time.time()),
        }
        doc["history"].append(entry)
        doc["updated"] = entry["timestamp"]
        self.store.write_session(doc)
        return entry


def transparency_alpha(regions, depth, patch):
    """Alpha channel: background cells with zero depth become transparent."""
    depth = np.asarray(depth)
    if regions is None:
        bg_px = np.ones(depth.shape, dtype=bool)
    else:
        bg_px = latent_to_pixel_mask(regions.background, patch)
    return (~(bg_px & (depth == 0.0))).astype(float)


def _bundle_dict(bundle):
    import json

    from ..prompt import serialize

    return json.loads(serialize(bundle))


def _npy_bytes(arr):
    buf = io.BytesIO()
    np.save(buf, np.asarray(arr))
    return buf.getvalue()


def _npy_load(data):
    return np.load(io.BytesIO(data))
