"""Exception hierarchy shared across the engine."""


class WordcraftError(Exception):
    """Base class for all engine errors."""


# --- glyph ---------------------------------------------------------------

class UnsupportedFont(WordcraftError):
    """Font file lacks a required table or uses an unsupported outline format."""


class MissingGlyph(WordcraftError):
    """Requested codepoint is not mapped by the font's cmap."""


class MalformedOutline(WordcraftError):
    """Outline data is structurally invalid (bad loca bounds, open contour, ...)."""


class InvalidDimensions(WordcraftError):
    """Raster canvas dimensions are not positive."""


# --- prompt --------------------------------------------------------------

class PromptSyntaxError(WordcraftError):
    """Mini-language parse failure; carries position and the expected token."""

    def __init__(self, message, position, expected=None):
        super().__init__(message)
        self.position = position
        self.expected = expected


class DuplicateRegion(WordcraftError):
    """The same region id was declared twice."""


class MissingBase(WordcraftError):
    """Task requires a base prompt but none was given."""


class RegionOnGlobal(WordcraftError):
    """A region directive appeared on a global-generation task."""


class SchemaViolation(WordcraftError):
    """Document failed field-level validation; carries the offending path."""

    def __init__(self, path, reason):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class EndpointUnreachable(WordcraftError):
    """LLM endpoint could not be contacted."""


class EndpointTimeout(WordcraftError):
    """LLM endpoint did not answer within the configured timeout."""


class SchemaViolationAfterRetries(WordcraftError):
    """LLM replies kept failing validation; carries the last raw reply."""

    def __init__(self, message, last_reply):
        super().__init__(message)
        self.last_reply = last_reply


# --- attention / model ---------------------------------------------------

class IndivisibleDimensions(WordcraftError):
    """Pixel dimensions are not an integer multiple of the latent grid."""


class OverlappingRegions(WordcraftError):
    """Region masks are not pairwise disjoint; carries offending cells."""

    def __init__(self, cells):
        super().__init__(f"regions overlap at {len(cells)} cell(s): {cells[:8]}")
        self.cells = cells


class LayoutMismatch(WordcraftError):
    """Token layout and region set disagree on the region count or grid."""


class ShapeMismatch(WordcraftError):
    """Tensor shapes disagree with the layout or config."""


class FullyMaskedRow(WordcraftError):
    """A query row has no allowed key; signals a mask-assembly bug."""


class DivergenceDetected(WordcraftError):
    """Training loss became NaN."""


# --- sampler / service ---------------------------------------------------

class MissingTrajectory(WordcraftError):
    """Edit request references a history entry with no recorded trajectory."""
