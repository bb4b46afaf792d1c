"""Minimal TrueType reader: cmap/loca/glyf/head/hhea/hmtx subset.

Quadratic outlines are converted to closed cubic contours by exact degree
elevation; composite glyphs are resolved recursively with their component
transforms. CFF-flavoured fonts are rejected.
"""

from __future__ import annotations

import struct

import numpy as np

from ..errors import MalformedOutline, MissingGlyph, UnsupportedFont
from .bezier import line_to_cubic, quadratic_to_cubic
from .outline import GlyphOutline

_ON_CURVE = 0x01
_X_SHORT = 0x02
_Y_SHORT = 0x04
_REPEAT = 0x08
_X_SAME_OR_POS = 0x10
_Y_SAME_OR_POS = 0x20

# composite flags
_ARG_1_AND_2_ARE_WORDS = 0x0001
_ARGS_ARE_XY_VALUES = 0x0002
_WE_HAVE_A_SCALE = 0x0008
_MORE_COMPONENTS = 0x0020
_WE_HAVE_AN_X_AND_Y_SCALE = 0x0040
_WE_HAVE_A_TWO_BY_TWO = 0x0080

_MAX_COMPONENT_DEPTH = 8


class TrueTypeFont:
    """Parsed table directory plus the headers needed for outline extraction."""

    def __init__(self, data: bytes):
        self.data = data
        if len(data) < 12:
            raise UnsupportedFont("file too short")
        (version,) = struct.unpack_from(">I", data, 0)
        if version == 0x4F54544F:  # 'OTTO'
            raise UnsupportedFont("CFF outlines not supported")
        if version not in (0x00010000, 0x74727565):  # 1.0 or 'true'
            raise UnsupportedFont(f"bad sfnt version 0x{version:08x}")
        (num_tables,) = struct.unpack_from(">H", data, 4)
        self.tables = {}
        for i in range(num_tables):
            off = 12 + 16 * i
            if off + 16 > len(data):
                raise UnsupportedFont("truncated table directory")
            tag, _csum, t_off, t_len = struct.unpack_from(">4sIII", data, off)
            if t_off + t_len > len(data):
                raise UnsupportedFont(f"table {tag!r} exceeds file size")
            self.tables[tag.decode("latin-1")] = (t_off, t_len)
        for required in ("cmap", "head", "maxp", "loca", "glyf", "hhea", "hmtx"):
            if required not in self.tables:
                raise UnsupportedFont(f"missing required table {required!r}")
        self._parse_head()
        self._parse_maxp()
        self._parse_hhea()
        self._parse_loca()
        self._parse_cmap()

    def _table(self, tag):
        off, length = self.tables[tag]
        return self.data[off:off + length]

    def _parse_head(self):
        head = self._table("head")
        if len(head) < 54:
            raise UnsupportedFont("head table too short")
        self.units_per_em = struct.unpack_from(">H", head, 18)[0]
        if self.units_per_em == 0:
            raise UnsupportedFont("unitsPerEm is zero")
        self.loca_long = struct.unpack_from(">h", head, 50)[0] == 1

    def _parse_maxp(self):
        maxp = self._table("maxp")
        if len(maxp) < 6:
            raise UnsupportedFont("maxp table too short")
        self.num_glyphs = struct.unpack_from(">H", maxp, 4)[0]

    def _parse_hhea(self):
        hhea = self._table("hhea")
        if len(hhea) < 36:
            raise UnsupportedFont("hhea table too short")
        self.num_hmetrics = struct.unpack_from(">H", hhea, 34)[0]

    def _parse_loca(self):
        loca = self._table("loca")
        n = self.num_glyphs + 1
        if self.loca_long:
            if len(loca) < 4 * n:
                raise UnsupportedFont("loca table too short")
            self.loca = struct.unpack_from(f">{n}I", loca, 0)
        else:
            if len(loca) < 2 * n:
                raise UnsupportedFont("loca table too short")
            self.loca = tuple(v * 2 for v in struct.unpack_from(f">{n}H", loca, 0))

    def _parse_cmap(self):
        cmap = self._table("cmap")
        if len(cmap) < 4:
            raise UnsupportedFont("cmap table too short")
        n_sub = struct.unpack_from(">H", cmap, 2)[0]
        subtables = []
        for i in range(n_sub):
            pid, eid, off = struct.unpack_from(">HHI", cmap, 4 + 8 * i)
            subtables.append((pid, eid, off))
        # prefer Windows BMP/UCS-4, then Unicode platform
        preference = [(3, 10), (0, 4), (0, 6), (3, 1), (0, 3), (0, 2), (0, 1), (0, 0)]
        chosen = None
        for want in preference:
            for pid, eid, off in subtables:
                if (pid, eid) == want:
                    chosen = off
                    break
            if chosen is not None:
                break
        if chosen is None and subtables:
            chosen = subtables[0][2]
        if chosen is None or chosen >= len(cmap):
            raise UnsupportedFont("no usable cmap subtable")
        self._char_map = self._parse_cmap_subtable(cmap, chosen)

    def _parse_cmap_subtable(self, cmap, off):
        fmt = struct.unpack_from(">H", cmap, off)[0]
        mapping = {}
        if fmt == 4:
            seg_x2 = struct.unpack_from(">H", cmap, off + 6)[0]
            segs = seg_x2 // 2
            ends = struct.unpack_from(f">{segs}H", cmap, off + 14)
            starts = struct.unpack_from(f">{segs}H", cmap, off + 16 + seg_x2)
            deltas = struct.unpack_from(f">{segs}h", cmap, off + 16 + 2 * seg_x2)
            range_off_pos = off + 16 + 3 * seg_x2
            range_offs = struct.unpack_from(f">{segs}H", cmap, range_off_pos)
            for i in range(segs):
                if starts[i] == 0xFFFF:
                    continue
                for c in range(starts[i], min(ends[i], 0xFFFE) + 1):
                    if range_offs[i] == 0:
                        gid = (c + deltas[i]) & 0xFFFF
                    else:
                        idx = range_off_pos + 2 * i + range_offs[i] + 2 * (c - starts[i])
                        if idx + 2 > len(cmap):
                            continue
                        gid = struct.unpack_from(">H", cmap, idx)[0]
                        if gid != 0:
                            gid = (gid + deltas[i]) & 0xFFFF
                    if gid != 0:
                        mapping[c] = gid
            return mapping
        if fmt == 12:
            n_groups = struct.unpack_from(">I", cmap, off + 12)[0]
            for g in range(n_groups):
                s, e, gid = struct.unpack_from(">III", cmap, off + 16 + 12 * g)
                for i, c in enumerate(range(s, e + 1)):
                    mapping[c] = gid + i
            return mapping
        if fmt == 0:
            gids = struct.unpack_from(">256B", cmap, off + 6)
            for c, gid in enumerate(gids):
                if gid != 0:
                    mapping[c] = gid
            return mapping
        if fmt == 6:
            first, count = struct.unpack_from(">HH", cmap, off + 6)
            gids = struct.unpack_from(f">{count}H", cmap, off + 10)
            for i, gid in enumerate(gids):
                if gid != 0:
                    mapping[first + i] = gid
            return mapping
        raise UnsupportedFont(f"cmap subtable format {fmt} not supported")

    def glyph_id(self, codepoint):
        gid = self._char_map.get(codepoint)
        if gid is None or gid >= self.num_glyphs:
            raise MissingGlyph(f"U+{codepoint:04X} is not mapped")
        return gid

    def advance_width(self, gid):
        hmtx = self._table("hmtx")
        idx = min(gid, self.num_hmetrics - 1)
        if 4 * idx + 2 > len(hmtx):
            raise UnsupportedFont("hmtx table too short")
        return struct.unpack_from(">H", hmtx, 4 * idx)[0]

    def _glyf_slice(self, gid):
        start, end = self.loca[gid], self.loca[gid + 1]
        glyf_off, glyf_len = self.tables["glyf"]
        if end < start or end > glyf_len:
            raise MalformedOutline(f"glyph {gid}: bad loca range {start}..{end}")
        return self.data[glyf_off + start:glyf_off + end]

    def glyph_points(self, gid, depth=0):
        """Contours of a glyph as lists of (x, y, on_curve) in font units."""
        if depth > _MAX_COMPONENT_DEPTH:
            raise MalformedOutline(f"glyph {gid}: component recursion too deep")
        data = self._glyf_slice(gid)
        if len(data) == 0:
            return []  # empty glyph (e.g. space)
        if len(data) < 10:
            raise MalformedOutline(f"glyph {gid}: header truncated")
        n_contours = struct.unpack_from(">h", data, 0)[0]
        if n_contours >= 0:
            return self._simple_points(gid, data, n_contours)
        return self._composite_points(gid, data, depth)

    def _simple_points(self, gid, data, n_contours):
        pos = 10
        if pos + 2 * n_contours + 2 > len(data):
            raise MalformedOutline(f"glyph {gid}: contour ends truncated")
        ends = struct.unpack_from(f">{n_contours}H", data, pos)
        pos += 2 * n_contours
        n_points = (ends[-1] + 1) if n_contours else 0
        (n_ins,) = struct.unpack_from(">H", data, pos)
        pos += 2 + n_ins

        flags = []
        while len(flags) < n_points:
            if pos >= len(data):
                raise MalformedOutline(f"glyph {gid}: flags truncated")
            flag = data[pos]
            pos += 1
            flags.append(flag)
            if flag & _REPEAT:
                if pos >= len(data):
                    raise MalformedOutline(f"glyph {gid}: repeat count truncated")
                flags.extend([flag] * data[pos])
                pos += 1
        if len(flags) != n_points:
            raise MalformedOutline(f"glyph {gid}: flag count mismatch")

        def read_deltas(short_bit, same_bit):
            nonlocal pos
            vals = []
            coord = 0
            for flag in flags:
                if flag & short_bit:
                    if pos >= len(data):
                        raise MalformedOutline(f"glyph {gid}: coords truncated")
                    delta = data[pos]
                    pos += 1
                    coord += delta if flag & same_bit else -delta
                elif not flag & same_bit:
                    if pos + 2 > len(data):
                        raise MalformedOutline(f"glyph {gid}: coords truncated")
                    coord += struct.unpack_from(">h", data, pos)[0]
                    pos += 2
                vals.append(coord)
            return vals

        xs = read_deltas(_X_SHORT, _X_SAME_OR_POS)
        ys = read_deltas(_Y_SHORT, _Y_SAME_OR_POS)

        contours = []
        start = 0
        for end in ends:
            if end < start or end >= n_points:
                raise MalformedOutline(f"glyph {gid}: bad contour end {end}")
            contours.append([
                (float(xs[i]), float(ys[i]), bool(flags[i] & _ON_CURVE))
                for i in range(start, end + 1)
            ])
            start = end + 1
        return contours

    def _composite_points(self, gid, data, depth):
        contours = []
        pos = 10
        while True:
            if pos + 4 > len(data):
                raise MalformedOutline(f"glyph {gid}: component truncated")
            flags, comp_gid = struct.unpack_from(">HH", data, pos)
            pos += 4
            if flags & _ARG_1_AND_2_ARE_WORDS:
                arg1, arg2 = struct.unpack_from(">hh", data, pos)
                pos += 4
            else:
                arg1, arg2 = struct.unpack_from(">bb", data, pos)
                pos += 2
            if not flags & _ARGS_ARE_XY_VALUES:
                raise UnsupportedFont(
                    f"glyph {gid}: point-matching composite not supported")
            a = d = 1.0
            b = c = 0.0
            if flags & _WE_HAVE_A_SCALE:
                a = d = _f2dot14(data, pos)
                pos += 2
            elif flags & _WE_HAVE_AN_X_AND_Y_SCALE:
                a = _f2dot14(data, pos)
                d = _f2dot14(data, pos + 2)
                pos += 4
            elif flags & _WE_HAVE_A_TWO_BY_TWO:
                a = _f2dot14(data, pos)
                b = _f2dot14(data, pos + 2)
                c = _f2dot14(data, pos + 4)
                d = _f2dot14(data, pos + 6)
                pos += 8
            if comp_gid >= self.num_glyphs:
                raise MalformedOutline(f"glyph {gid}: component id out of range")
            for contour in self.glyph_points(comp_gid, depth + 1):
                contours.append([
                    (a * x + c * y + arg1, b * x + d * y + arg2, on)
                    for x, y, on in contour
                ])
            if not flags & _MORE_COMPONENTS:
                break
        return contours


def _f2dot14(data, pos):
    return struct.unpack_from(">h", data, pos)[0] / 16384.0


def _contour_to_cubics(points, scale):
    """TrueType quadratic contour -> list of cubic segments (em units).

    Off-curve runs imply on-curve midpoints; the contour may start off-curve.
    """
    if len(points) == 0:
        return None
    pts = [(x * scale, y * scale, on) for x, y, on in points]
    if all(not on for _, _, on in pts):
        # fully off-curve contour: all midpoints are implicit
        mids = []
        n = len(pts)
        for i in range(n):
            x0, y0, _ = pts[i]
            x1, y1, _ = pts[(i + 1) % n]
            mids.append(((x0 + x1) / 2.0, (y0 + y1) / 2.0, True))
        expanded = []
        for i in range(n):
            expanded.append(mids[i])
            expanded.append(pts[(i + 1) % n])
        pts = expanded
    # rotate so the contour starts on-curve
    first_on = next(i for i, p in enumerate(pts) if p[2])
    pts = pts[first_on:] + pts[:first_on]
    pts.append(pts[0])  # close

    segs = []
    i = 0
    cur = np.array(pts[0][:2])
    while i < len(pts) - 1:
        nxt = pts[i + 1]
        if nxt[2]:  # on-curve: straight line
            end = np.array(nxt[:2])
            if not np.allclose(cur, end, atol=1e-12):
                segs.append(np.stack(line_to_cubic(cur, end)))
            cur = end
            i += 1
        else:
            ctrl = np.array(nxt[:2])
            after = pts[i + 2] if i + 2 < len(pts) else pts[0]
            if after[2]:
                end = np.array(after[:2])
                i += 2
            else:  # implied on-curve midpoint between two off-curve points
                end = (ctrl + np.array(after[:2])) / 2.0
                i += 1
            segs.append(np.stack(quadratic_to_cubic(cur, ctrl, end)))
            cur = end
    if not segs:
        return None
    return np.stack(segs)


def load_glyph(font_bytes, codepoint):
    """Parse one character's outline from a TrueType font, em-normalized."""
    font = TrueTypeFont(font_bytes)
    gid = font.glyph_id(codepoint)
    scale = 1.0 / font.units_per_em
    contours = []
    for pts in font.glyph_points(gid):
        cubics = _contour_to_cubics(pts, scale)
        if cubics is not None:
            contours.append(cubics)
    return GlyphOutline(
        contours=contours,
        advance_width=font.advance_width(gid) * scale,
        codepoint=codepoint,
    )


def load_word(font_bytes, text):
    """Outlines for each character of `text` from one font."""
    font = TrueTypeFont(font_bytes)
    scale = 1.0 / font.units_per_em
    glyphs = []
    for ch in text:
        gid = font.glyph_id(ord(ch))
        contours = []
        for pts in font.glyph_points(gid):
            cubics = _contour_to_cubics(pts, scale)
            if cubics is not None:
                contours.append(cubics)
        glyphs.append(GlyphOutline(
            contours=contours,
            advance_width=font.advance_width(gid) * scale,
            codepoint=ord(ch),
        ))
    return glyphs
