#!/usr/bin/env python3
"""Build the bundled test font (assets/wctest.ttf) with fontTools.

Glyphs, all in a 1000-unit em:
  I  one rectangular contour (straight lines only)
  O  two quadratic contours with opposite winding (outer ring + hole)
  K  one polygon contour (lines only)
  H  composite glyph: two translated components referencing I
Codepoint U+E000 is intentionally left unmapped for MissingGlyph tests.
"""

import os

from fontTools.fontBuilder import FontBuilder
from fontTools.pens.ttGlyphPen import TTGlyphPen
from fontTools.ttLib.tables._g_l_y_f import GlyphComponent, Glyph

UPM = 1000


def rect(pen, x0, y0, x1, y1):
    pen.moveTo((x0, y0))
    pen.lineTo((x1, y0))
    pen.lineTo((x1, y1))
    pen.lineTo((x0, y1))
    pen.closePath()


def ring(pen, cx, cy, r, clockwise=False):
    """Quadratic approximation of a circle from 4 on-curve + 4 off-curve points."""
    k = r  # control distance for a quad circle approximation
    pts = [
        ((cx + r, cy), (cx + k, cy + k)),
        ((cx, cy + r), (cx - k, cy + k)),
        ((cx - r, cy), (cx - k, cy - k)),
        ((cx, cy - r), (cx + k, cy - k)),
    ]
    if clockwise:
        pts = [
            ((cx + r, cy), (cx + k, cy - k)),
            ((cx, cy - r), (cx - k, cy - k)),
            ((cx - r, cy), (cx - k, cy + k)),
            ((cx, cy + r), (cx + k, cy + k)),
        ]
    pen.moveTo(pts[0][0])
    for i in range(4):
        ctrl = pts[i][1]
        end = pts[(i + 1) % 4][0]
        pen.qCurveTo(ctrl, end)
    pen.closePath()


def glyph_I():
    pen = TTGlyphPen(None)
    rect(pen, 280, 0, 470, 700)
    return pen.glyph()


def glyph_O():
    pen = TTGlyphPen(None)
    ring(pen, 375, 350, 330, clockwise=False)
    ring(pen, 375, 350, 190, clockwise=True)
    return pen.glyph()


def glyph_K():
    pen = TTGlyphPen(None)
    pen.moveTo((100, 0))
    pen.lineTo((250, 0))
    pen.lineTo((250, 260))
    pen.lineTo((480, 0))
    pen.lineTo((660, 0))
    pen.lineTo((370, 360))
    pen.lineTo((640, 700))
    pen.lineTo((460, 700))
    pen.lineTo((250, 420))
    pen.lineTo((250, 700))
    pen.lineTo((100, 700))
    pen.closePath()
    return pen.glyph()


def glyph_H_composite():
    g = Glyph()
    g.numberOfContours = -1
    comps = []
    for dx in (0, 280):
        c = GlyphComponent()
        c.glyphName = "I"
        c.x, c.y = dx - 180, 0
        c.flags = 0
        comps.append(c)
    g.components = comps
    return g


def main(out_path):
    glyphs = {
        ".notdef": TTGlyphPen(None).glyph(),
        "I": glyph_I(),
        "O": glyph_O(),
        "K": glyph_K(),
        "H": glyph_H_composite(),
    }
    metrics = {
        ".notdef": (600, 0),
        "I": (750, 280),
        "O": (750, 45),
        "K": (760, 100),
        "H": (750, 100),
    }
    cmap = {ord("I"): "I", ord("O"): "O", ord("K"): "K", ord("H"): "H"}

    fb = FontBuilder(UPM, isTTF=True)
    fb.setupGlyphOrder(list(glyphs.keys()))
    fb.setupCharacterMap(cmap)
    fb.setupGlyf(glyphs)
    fb.setupHorizontalMetrics(metrics)
    fb.setupHorizontalHeader(ascent=800, descent=-200)
    fb.setupNameTable({"familyName": "WCTest", "styleName": "Regular"})
    fb.setupOS2(sTypoAscender=800, sTypoDescender=-200)
    fb.setupPost()
    fb.save(out_path)
    print(f"wrote {out_path}")


if __name__ == "__main__":
    here = os.path.dirname(os.path.abspath(__file__))
    main(os.path.join(here, "..", "assets", "wctest.ttf"))
