"""Engine style vocabulary.

Colors and patterns render deterministically from (pattern, color, pixel
coordinates), which keeps region-level semantics measurable: every claim
about a generated region can be checked against the procedural definition.

Foreground styling covers pattern-on pixels with the color and pattern-off
pixels with white. Background tokens are distinct words (e.g.
"gray-background") because text tokens carry no positional encoding: a
token's role must live in its identity.
"""

from __future__ import annotations

import numpy as np

UNK = "<unk>"

COLORS = {
    "red": (0.9, 0.1, 0.1),
    "green": (0.1, 0.8, 0.1),
    "blue": (0.1, 0.2, 0.9),
    "gray": (0.5, 0.5, 0.5),
}

PATTERNS = ("solid", "stripes", "dots", "checker")

# pattern geometry (pixels)
TILE = 8            # stripe period, dot lattice pitch, checker square
DOT_RADIUS = 2
OFF_COLOR = (1.0, 1.0, 1.0)

TOKENS = (
    UNK,
    *PATTERNS,
    *COLORS.keys(),
    *(f"{c}-background" for c in COLORS.keys()),
)
TOKEN_IDS = {tok: i for i, tok in enumerate(TOKENS)}

BACKGROUND_TOKENS = {f"{c}-background": c for c in COLORS.keys()}


def vocab_size():
    return len(TOKENS)


def token_id(token):
    return TOKEN_IDS.get(token, TOKEN_IDS[UNK])


def encode_tokens(tokens):
    return [token_id(t) for t in tokens]


def background_token(color_name):
    return f"{color_name}-background"


def pattern_on_mask(pattern, height, width):
    """Boolean on/off template of a pattern over absolute pixel coordinates."""
    yy, xx = np.mgrid[0:height, 0:width]
    if pattern == "solid":
        return np.ones((height, width), dtype=bool)
    if pattern == "stripes":  # diagonal, 50% duty
        return (xx + yy) % TILE < TILE // 2
    if pattern == "dots":  # disks on a TILE-pitch lattice
        cy = yy % TILE - TILE // 2
        cx = xx % TILE - TILE // 2
        return cx * cx + cy * cy <= DOT_RADIUS * DOT_RADIUS
    if pattern == "checker":
        return ((xx // TILE) + (yy // TILE)) % 2 == 0
    raise KeyError(f"unknown pattern {pattern!r}")


def render_style(pattern, color_name, height, width):
    """(H, W, 3) image of a styled foreground: color on-pixels, white off."""
    on = pattern_on_mask(pattern, height, width)
    img = np.empty((height, width, 3))
    img[:] = OFF_COLOR
    img[on] = COLORS[color_name]
    return img


def render_example_image(fg_mask, pattern, color_name, bg_color_name):
    """Styled glyph over a solid background: the training target."""
    fg_mask = np.asarray(fg_mask, dtype=bool)
    h, w = fg_mask.shape
    img = np.empty((h, w, 3))
    img[:] = COLORS[bg_color_name]
    styled = render_style(pattern, color_name, h, w)
    img[fg_mask] = styled[fg_mask]
    return img


def nearest_color(rgb):
    """(color name, margin): margin is the runner-up distance minus the best."""
    rgb = np.asarray(rgb, dtype=float)
    dists = sorted(
        (float(np.linalg.norm(rgb - np.asarray(c))), name)
        for name, c in COLORS.items()
    )
    best_d, best = dists[0]
    margin = dists[1][0] - best_d
    return best, margin


def classify_pattern(image, pixels, color_name):
    """Best-matching pattern for the given pixel set of an image.

    Compares the image against each pattern's procedural rendering (with the
    prompt color) and returns (pattern, mae of best, mae per pattern).
    """
    image = np.asarray(image, dtype=float)
    h, w = image.shape[:2]
    ys, xs = np.nonzero(pixels)
    errors = {}
    for pattern in PATTERNS:
        expected = render_style(pattern, color_name, h, w)
        errors[pattern] = float(
            np.abs(image[ys, xs] - expected[ys, xs]).mean())
    best = min(errors, key=errors.get)
    return best, errors[best], errors
