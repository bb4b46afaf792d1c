"""Session service: content-addressed store, session manager, HTTP API, CLI."""

from .config import ServiceConfig, load_config
from .sessions import SessionManager, prepare_glyph_images, transparency_alpha
from .store import ArtifactStore

__all__ = [
    "ArtifactStore",
    "ServiceConfig",
    "SessionManager",
    "load_config",
    "prepare_glyph_images",
    "transparency_alpha",
]
