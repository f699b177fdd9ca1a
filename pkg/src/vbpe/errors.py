"""Exception hierarchy shared by every vbpe module.

Each class carries a stable ``code`` string so that CLI consumers and
foreign-language wrappers can map failures without parsing messages.
"""


class VbpeError(Exception):
    """Base class for all library errors."""

    code = "error"


class UnknownToken(VbpeError):
    """Token id is neither a base id nor defined by the vocabulary."""

    code = "unknown-token"


class ShapeError(VbpeError):
    """Array dimensions do not match what the operation requires."""

    code = "shape-error"


class TilingViolation(VbpeError):
    """Regions fail to tile the grid exactly (gap or overlap)."""

    code = "tiling-violation"


class EmptyCorpus(VbpeError):
    """An operation that needs at least one grid/sequence got none."""

    code = "empty-corpus"


class EmptyStatistics(VbpeError):
    """Pair statistics were requested but no adjacency was observed."""

    code = "empty-statistics"


class InvalidParameter(VbpeError):
    """A numeric parameter is outside its documented domain."""

    code = "invalid-parameter"


class IndexOutOfRange(VbpeError):
    """A cell value or token id exceeds the configured id range."""

    code = "index-out-of-range"


class ExhaustedPairs(VbpeError):
    """No mergeable pair remains; terminates the training loop."""

    code = "exhausted-pairs"


class MalformedSequence(VbpeError):
    """A token sequence cannot be tiled back into the stated grid shape."""

    code = "malformed-sequence"


class LayoutViolation(VbpeError):
    """A token id is invalid under the sequence id-space layout."""

    code = "layout-violation"


class LayoutMismatch(VbpeError):
    """CLI layout flags disagree with the layout stored in a file."""

    code = "layout-mismatch"


class PoolExhausted(VbpeError):
    """A data pool with a positive sampling ratio is empty."""

    code = "pool-exhausted"


class FileFormatError(VbpeError):
    """A binary or JSON artifact is malformed; reports the byte offset."""

    code = "file-format"

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset
