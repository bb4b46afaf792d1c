"""Character parameterization: font outlines, rasterization, pseudo-depth."""

from .bezier import eval_cubic, eval_quadratic, line_to_cubic, quadratic_to_cubic
from .depth import depth_from_coverage, exact_edt_sq
from .outline import GlyphOutline, format_contour_text, parse_contour_text
from .raster import DepthMap, RasterImage, compose_word, rasterize
from .truetype import load_glyph, load_word

__all__ = [
    "DepthMap",
    "GlyphOutline",
    "RasterImage",
    "compose_word",
    "depth_from_coverage",
    "eval_cubic",
    "eval_quadratic",
    "exact_edt_sq",
    "format_contour_text",
    "line_to_cubic",
    "load_glyph",
    "load_word",
    "parse_contour_text",
    "quadratic_to_cubic",
    "rasterize",
]
