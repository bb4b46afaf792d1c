"""Glyph outline container, validation, and the plain-text contour format."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import MalformedOutline

CLOSURE_TOL = 1e-9
COORD_LO, COORD_HI = -0.5, 1.5


@dataclass(frozen=True)
class GlyphOutline:
    """Closed cubic-Bezier contours of one character, em-normalized.

    contours: list of (n_segments, 4, 2) float arrays; each contour closed.
    advance_width: em-normalized advance.
    codepoint: Unicode scalar value, or -1 for synthetic outlines.
    """

    contours: list = field(default_factory=list)
    advance_width: float = 1.0
    codepoint: int = -1

    def __post_init__(self):
        normed = []
        for ci, contour in enumerate(self.contours):
            arr = np.asarray(contour, dtype=float)
            if arr.ndim != 3 or arr.shape[1:] != (4, 2):
                raise MalformedOutline(
                    f"contour {ci}: expected (n, 4, 2) cubic segments, got {arr.shape}")
            if arr.shape[0] == 0:
                raise MalformedOutline(f"contour {ci}: empty")
            # joint continuity and closure
            ends = arr[:, 3, :]
            starts = np.roll(arr[:, 0, :], -1, axis=0)
            if not np.allclose(ends, starts, atol=CLOSURE_TOL, rtol=0.0):
                raise MalformedOutline(f"contour {ci}: not closed")
            if arr.min() < COORD_LO or arr.max() > COORD_HI:
                raise MalformedOutline(
                    f"contour {ci}: coordinates outside [{COORD_LO}, {COORD_HI}]"
                    " (em normalization error?)")
            normed.append(arr)
        object.__setattr__(self, "contours", normed)

    @property
    def is_empty(self):
        return len(self.contours) == 0

    def bbox(self):
        """(xmin, ymin, xmax, ymax) over control points; None when empty."""
        if self.is_empty:
            return None
        pts = np.concatenate([c.reshape(-1, 2) for c in self.contours])
        return pts[:, 0].min(), pts[:, 1].min(), pts[:, 0].max(), pts[:, 1].max()

    def transformed(self, scale=1.0, dx=0.0, dy=0.0):
        return GlyphOutline(
            contours=[c * scale + np.array([dx, dy]) for c in self.contours],
            advance_width=self.advance_width * scale,
            codepoint=self.codepoint,
        )


def parse_contour_text(text):
    """Parse the plain-text contour exchange format.

    One contour per line; segments `C x0 y0 x1 y1 x2 y2 x3 y3` separated by `;`.
    Lines starting with `#` and blank lines are ignored.
    """
    contours = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        segs = []
        for chunk in line.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            parts = chunk.split()
            if parts[0] != "C" or len(parts) != 9:
                raise MalformedOutline(
                    f"line {lineno}: expected 'C x0 y0 ... y3', got {chunk!r}")
            try:
                vals = [float(v) for v in parts[1:]]
            except ValueError as exc:
                raise MalformedOutline(f"line {lineno}: {exc}") from exc
            segs.append(np.array(vals, dtype=float).reshape(4, 2))
        if segs:
            contours.append(np.stack(segs))
    return GlyphOutline(contours=contours)


def format_contour_text(outline):
    """Inverse of parse_contour_text (advance width is not carried)."""
    lines = []
    for contour in outline.contours:
        segs = " ; ".join(
            "C " + " ".join(f"{v:.9g}" for v in seg.reshape(-1)) for seg in contour)
        lines.append(segs)
    return "\n".join(lines) + ("\n" if lines else "")
