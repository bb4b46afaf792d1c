"""Service configuration: file plus environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from ..prompt import EndpointConfig

ENV_ADDR = "WORDCRAFT_ADDR"
ENV_STORE = "WORDCRAFT_STORE"
ENV_CHECKPOINT = "WORDCRAFT_CHECKPOINT"
ENV_LLM_URL = "WORDCRAFT_LLM_URL"


@dataclass
class ServiceConfig:
    addr: str = "127.0.0.1:8787"
    store_dir: str = "wordcraft-store"
    checkpoint_path: str = ""
    font_paths: dict = field(default_factory=dict)  # name -> path
    cors_origins: tuple = ("*",)
    llm: EndpointConfig = field(default_factory=EndpointConfig)

    @property
    def host(self):
        return self.addr.rsplit(":", 1)[0]

    @property
    def port(self):
        return int(self.addr.rsplit(":", 1)[1])


def load_config(path=None, **overrides):
    """Config file (JSON) -> env vars -> explicit overrides, later wins."""
    data = {}
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    cfg = ServiceConfig(
        addr=data.get("addr", ServiceConfig.addr),
        store_dir=data.get("store_dir", ServiceConfig.store_dir),
        checkpoint_path=data.get("checkpoint", ""),
        font_paths=dict(data.get("fonts", {})),
        cors_origins=tuple(data.get("cors_origins", ("*",))),
        llm=EndpointConfig(**data.get("llm", {})),
    )
    if os.environ.get(ENV_ADDR):
        cfg.addr = os.environ[ENV_ADDR]
    if os.environ.get(ENV_STORE):
        cfg.store_dir = os.environ[ENV_STORE]
    if os.environ.get(ENV_CHECKPOINT):
        cfg.checkpoint_path = os.environ[ENV_CHECKPOINT]
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if not cfg.font_paths:
        bundled = _bundled_font()
        if bundled:
            cfg.font_paths = {"wctest": bundled}
    return cfg


def _bundled_font():
    here = os.path.dirname(os.path.abspath(__file__))
    candidates = [
        os.path.join(here, "..", "..", "..", "assets", "wctest.ttf"),
        os.path.join(os.getcwd(), "assets", "wctest.ttf"),
    ]
    for c in candidates:
        if os.path.exists(c):
            return os.path.abspath(c)
    return None
