"""wordcraft: interactive artistic-typography engine.

Regional attention for multi-region generation, noise blending for continuous
editing, structured prompt parsing, and a glyph-conditioned rectified-flow
denoiser, with an HTTP session service and CLI on top.
"""

__version__ = "0.1.0"
