"""Token layout bookkeeping for the concatenated sequence [X; T_b; T_1..T_N; D].

Image tokens X and depth tokens D are spatially aligned 1:1 on the latent
grid; text spans sit between them. All spans are contiguous and cover [0, S).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import LayoutMismatch


@dataclass(frozen=True)
class TokenLayout:
    image_span: tuple      # (offset, length) for X
    base_span: tuple       # (offset, length) for T_b, length may be 0
    region_spans: tuple    # ordered ((offset, length), ...) for T_1..T_N
    depth_span: tuple      # (offset, length) for D
    grid: tuple            # (rows, cols)

    def __post_init__(self):
        rows, cols = self.grid
        if rows < 1 or cols < 1:
            raise LayoutMismatch(f"bad grid {self.grid}")
        cells = rows * cols
        if self.image_span[1] != cells or self.depth_span[1] != cells:
            raise LayoutMismatch(
                f"X/D spans must cover the {rows}x{cols} grid exactly")
        spans = [self.image_span, self.base_span, *self.region_spans,
                 self.depth_span]
        expect = 0
        for off, length in spans:
            if length < 0:
                raise LayoutMismatch("negative span length")
            if off != expect:
                raise LayoutMismatch(
                    f"spans must be contiguous in order X, T_b, T_k.., D; "
                    f"expected offset {expect}, got {off}")
            expect = off + length
        for off, length in self.region_spans:
            if length < 1:
                raise LayoutMismatch("region spans must be non-empty")
        object.__setattr__(self, "region_spans", tuple(self.region_spans))

    @classmethod
    def build(cls, grid, base_len, region_lens):
        """Lay out spans for a latent grid, a base prompt of base_len tokens,
        and one span per regional prompt."""
        rows, cols = grid
        cells = rows * cols
        offset = 0
        image = (offset, cells)
        offset += cells
        base = (offset, base_len)
        offset += base_len
        regions = []
        for n in region_lens:
            regions.append((offset, n))
            offset += n
        depth = (offset, cells)
        offset += cells
        return cls(image_span=image, base_span=base,
                   region_spans=tuple(regions), depth_span=depth,
                   grid=(rows, cols))

    @property
    def total(self):
        return self.depth_span[0] + self.depth_span[1]

    @property
    def region_count(self):
        return len(self.region_spans)

    def spans_in_order(self):
        """(kind, region_index_or_None, offset, length) tuples covering [0, S)."""
        out = [("image", None, *self.image_span), ("base", None, *self.base_span)]
        for k, span in enumerate(self.region_spans, start=1):
            out.append(("region", k, *span))
        out.append(("depth", None, *self.depth_span))
        return out
