"""Checkpoint container: magic WCCK, version, config echo, tensor manifest,
little-endian float32 parameter blob. Byte-exact round trips."""

from __future__ import annotations

import hashlib
import io
import json
import struct

import numpy as np

from .config import DenoiserConfig
from .denoiser import Denoiser

MAGIC = b"WCCK"
VERSION = 1


def save_checkpoint(model, extra=None):
    """Serialize a model to checkpoint bytes."""
    blobs = model.parameter_blobs()
    manifest = []
    payload = io.BytesIO()
    offset = 0
    for name in sorted(blobs):
        arr = np.ascontiguousarray(blobs[name], dtype="<f4")
        raw = arr.tobytes()
        manifest.append({"name": name, "shape": list(arr.shape),
                         "offset": offset, "nbytes": len(raw)})
        payload.write(raw)
        offset += len(raw)
    header = {
        "version": VERSION,
        "config": model.config.to_dict(),
        "tensors": manifest,
        "extra": extra or {},
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(struct.pack("<II", VERSION, len(header_bytes)))
    out.write(header_bytes)
    out.write(payload.getvalue())
    return out.getvalue()


def load_checkpoint(data):
    """(config, blobs, extra) from checkpoint bytes."""
    if len(data) < 12 or data[:4] != MAGIC:
        raise ValueError("not a WCCK checkpoint")
    version, header_len = struct.unpack_from("<II", data, 4)
    if version != VERSION:
        raise ValueError(f"unsupported checkpoint version {version}")
    header = json.loads(data[12:12 + header_len].decode("utf-8"))
    body = data[12 + header_len:]
    blobs = {}
    for entry in header["tensors"]:
        raw = body[entry["offset"]:entry["offset"] + entry["nbytes"]]
        arr = np.frombuffer(raw, dtype="<f4").reshape(entry["shape"]).copy()
        blobs[entry["name"]] = arr
    config = DenoiserConfig.from_dict(header["config"])
    return config, blobs, header.get("extra", {})


def model_from_checkpoint(data):
    config, blobs, extra = load_checkpoint(data)
    model = Denoiser(config)
    model.load_parameter_blobs(blobs)
    model.eval()
    return model, extra


def write_checkpoint(model, path, extra=None):
    data = save_checkpoint(model, extra=extra)
    with open(path, "wb") as fh:
        fh.write(data)
    return data


def read_checkpoint(path):
    with open(path, "rb") as fh:
        return model_from_checkpoint(fh.read())


def checkpoint_digest(data):
    return hashlib.sha256(data).hexdigest()
