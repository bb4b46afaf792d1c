"""Trajectory: the full record of a deterministic sampling run.

Stores every latent state and every per-step prediction so that (a) replaying
the predictions through the solver reproduces the stored latents bit-exactly
and (b) continuous editing can reuse the recorded predictions as the
unedited-region vector field. Serialized as WCTJ: magic, version, JSON header
(schedule, seed, conditioning digest, shape manifest), float32 LE blobs.
"""

from __future__ import annotations

import hashlib
import io
import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .schedule import Schedule

MAGIC = b"WCTJ"
VERSION = 1


@dataclass
class Trajectory:
    seed: int
    schedule: Schedule
    states: np.ndarray        # (steps+1, 3, H, W) float32, t=1 first
    preds: np.ndarray         # (steps,   3, H, W) float32
    bundle_doc: str           # serialized conditioning bundle
    depth: np.ndarray         # (H, W) float32
    base_policy: str = "all"
    kind: str = "generate"    # generate | invert | edit
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.states = np.ascontiguousarray(self.states, dtype=np.float32)
        self.preds = np.ascontiguousarray(self.preds, dtype=np.float32)
        self.depth = np.ascontiguousarray(self.depth, dtype=np.float32)
        n = self.schedule.steps
        if self.states.shape[0] != n + 1 or self.preds.shape[0] != n:
            raise ValueError("states/preds length does not match the schedule")

    @property
    def final_latents(self):
        return self.states[-1]

    def final_image(self):
        """(H, W, 3) pixels in [0, 1]."""
        return np.clip(self.final_latents, 0.0, 1.0).transpose(1, 2, 0)

    def initial_latents(self):
        return self.states[0]

    def replay(self):
        """Re-step the stored predictions; returns the final latents.

        Bit-exact equality with the stored states is an invariant, asserted
        by tests rather than here.
        """
        x = self.states[0].copy()
        for i in range(self.schedule.steps):
            x = x + self.schedule.dt32(i) * self.preds[i]
        return x

    def conditioning_digest(self):
        h = hashlib.sha256()
        h.update(self.bundle_doc.encode("utf-8"))
        h.update(self.base_policy.encode("utf-8"))
        h.update(np.ascontiguousarray(self.depth, dtype="<f4").tobytes())
        return h.hexdigest()

    # --- serialization ----------------------------------------------------

    def to_bytes(self):
        blobs = [
            ("states", np.ascontiguousarray(self.states, dtype="<f4")),
            ("preds", np.ascontiguousarray(self.preds, dtype="<f4")),
            ("depth", np.ascontiguousarray(self.depth, dtype="<f4")),
        ]
        manifest = []
        payload = io.BytesIO()
        offset = 0
        for name, arr in blobs:
            raw = arr.tobytes()
            manifest.append({"name": name, "shape": list(arr.shape),
                             "offset": offset, "nbytes": len(raw)})
            payload.write(raw)
            offset += len(raw)
        header = {
            "version": VERSION,
            "seed": self.seed,
            "schedule": {"steps": self.schedule.steps,
                         "times": self.schedule.to_list()},
            "bundle_doc": self.bundle_doc,
            "base_policy": self.base_policy,
            "kind": self.kind,
            "extra": self.extra,
            "conditioning_digest": self.conditioning_digest(),
            "tensors": manifest,
        }
        head = json.dumps(header, sort_keys=True).encode("utf-8")
        out = io.BytesIO()
        out.write(MAGIC)
        out.write(struct.pack("<II", VERSION, len(head)))
        out.write(head)
        out.write(payload.getvalue())
        return out.getvalue()

    @classmethod
    def from_bytes(cls, data):
        if len(data) < 12 or data[:4] != MAGIC:
            raise ValueError("not a WCTJ trajectory")
        version, header_len = struct.unpack_from("<II", data, 4)
        if version != VERSION:
            raise ValueError(f"unsupported trajectory version {version}")
        header = json.loads(data[12:12 + header_len].decode("utf-8"))
        body = data[12 + header_len:]
        arrays = {}
        for entry in header["tensors"]:
            raw = body[entry["offset"]:entry["offset"] + entry["nbytes"]]
            arrays[entry["name"]] = np.frombuffer(raw, dtype="<f4").reshape(
                entry["shape"]).copy()
        schedule = Schedule(steps=header["schedule"]["steps"],
                            times=np.asarray(header["schedule"]["times"]))
        traj = cls(seed=header["seed"], schedule=schedule,
                   states=arrays["states"], preds=arrays["preds"],
                   bundle_doc=header["bundle_doc"], depth=arrays["depth"],
                   base_policy=header.get("base_policy", "all"),
                   kind=header.get("kind", "generate"),
                   extra=header.get("extra", {}))
        stored = header.get("conditioning_digest")
        if stored and stored != traj.conditioning_digest():
            raise ValueError("trajectory conditioning digest mismatch")
        return traj

    def save(self, path):
        data = self.to_bytes()
        with open(path, "wb") as fh:
            fh.write(data)
        return data

    @classmethod
    def load(cls, path):
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())
