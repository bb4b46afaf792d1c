"""Content-addressed artifact store with crash-safe session index files.

Artifacts are digest-named and written via temp-file-then-rename, so a
killed process never leaves a partially written object under its final name.
Session documents are small JSON files updated with the same atomic-replace
discipline.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile

_EXTS = {"png": "image/png", "wctj": "application/octet-stream",
         "wcck": "application/octet-stream", "npy": "application/octet-stream",
         "json": "application/json"}


def content_type(key):
    ext = key.rsplit(".", 1)[-1]
    return _EXTS.get(ext, "application/octet-stream")


class ArtifactStore:
    def __init__(self, root):
        self.root = os.path.abspath(root)
        self.objects_dir = os.path.join(self.root, "objects")
        self.sessions_dir = os.path.join(self.root, "sessions")
        os.makedirs(self.objects_dir, exist_ok=True)
        os.makedirs(self.sessions_dir, exist_ok=True)

    # --- objects ------------------------------------------------------------

    def put(self, data: bytes, ext: str) -> str:
        """Store bytes; returns the content-addressed key."""
        digest = hashlib.sha256(data).hexdigest()
        key = f"{digest}.{ext}"
        path = os.path.join(self.objects_dir, key)
        if not os.path.exists(path):
            self._atomic_write(path, data)
        return key

    def get(self, key: str) -> bytes:
        path = self._object_path(key)
        with open(path, "rb") as fh:
            return fh.read()

    def has(self, key: str) -> bool:
        try:
            return os.path.exists(self._object_path(key))
        except ValueError:
            return False

    def _object_path(self, key):
        if "/" in key or "\\" in key or ".." in key:
            raise ValueError(f"bad artifact key {key!r}")
        return os.path.join(self.objects_dir, key)

    # --- sessions -----------------------------------------------------------

    def write_session(self, doc: dict):
        sid = doc["id"]
        path = os.path.join(self.sessions_dir, f"{sid}.json")
        self._atomic_write(path, json.dumps(doc, sort_keys=True).encode("utf-8"))

    def read_session(self, sid: str) -> dict | None:
        path = os.path.join(self.sessions_dir, f"{sid}.json")
        if not os.path.exists(path):
            return None
        with open(path, "rb") as fh:
            return json.loads(fh.read().decode("utf-8"))

    def list_sessions(self):
        out = []
        for name in sorted(os.listdir(self.sessions_dir)):
            if name.endswith(".json"):
                out.append(name[:-5])
        return out

    # --- internals ----------------------------------------------------------

    def _atomic_write(self, path, data):
        directory = os.path.dirname(path)
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
