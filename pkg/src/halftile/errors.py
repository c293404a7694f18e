"""Exception hierarchy shared across the tile engine and the collectives."""


class HalftileError(Exception):
    """Base class for all halftile errors."""


class OutOfBoundsError(HalftileError):
    """A tile load/store addressed an element outside the buffer."""

    def __init__(self, index, size):
        self.index = index
        self.size = size
        super().__init__(f"element index {index} outside buffer of {size} elements")


class InvalidStrideError(HalftileError):
    """Leading dimension smaller than the length of a tile row/column."""


class WrongKindError(HalftileError):
    """Operation applied to a fragment of an unsupported kind."""


class ShapeMismatchError(HalftileError):
    """Operand shapes do not conform."""


class BadLengthError(HalftileError):
    """Input length violates an operation's size contract."""


class BadConfigError(HalftileError):
    """Invalid block configuration (warps per block, coarsening, ...)."""


class ParseError(HalftileError):
    """Input file could not be parsed."""
