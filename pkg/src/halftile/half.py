"""IEEE 754 binary16 scalar arithmetic and conversions.

Scalars are represented by :class:`Half`, a thin wrapper around the raw
16-bit pattern (1 sign, 5 exponent, 10 mantissa bits).  Bulk data lives in
``numpy.float16`` arrays; the two views are bit-compatible.

Arithmetic is performed by widening to binary32, operating, and rounding
back to binary16 (numpy's native half path).  This is exact with respect
to a single correctly-rounded operation: binary32 carries more than twice
the significand bits of binary16 (24 >= 2*11 + 2), so the intermediate
rounding can never move the result across a binary16 rounding boundary.
Subnormals are fully supported; there is no flush-to-zero.
"""

from __future__ import annotations

import numpy as np

from .errors import ParseError

#: dtype used for all element buffers.
HALF = np.dtype(np.float16)

#: Largest finite binary16 value.
MAX_FINITE = 65504.0

#: All integers with magnitude up to this bound convert and add exactly.
EXACT_INT_BOUND = 2048


class Half:
    """A single binary16 value, identified by its bit pattern."""

    __slots__ = ("_bits",)

    def __init__(self, bits: int):
        if not 0 <= bits <= 0xFFFF:
            raise ValueError(f"bit pattern {bits:#x} does not fit in 16 bits")
        self._bits = bits

    @property
    def bits(self) -> int:
        return self._bits

    @classmethod
    def from_f32(cls, value: float) -> "Half":
        """Round a binary32 value to the nearest binary16 (ties to even).

        Values beyond the finite range become signed infinity; subnormal
        results are kept, not flushed.
        """
        with np.errstate(over="ignore"):
            h = np.float32(value).astype(np.float16)
        return cls(int(h.view(np.uint16)))

    @classmethod
    def from_np(cls, value: np.float16) -> "Half":
        return cls(int(np.float16(value).view(np.uint16)))

    @classmethod
    def from_text(cls, text: str) -> "Half":
        """Parse a decimal/scientific literal through binary32."""
        try:
            f = np.float32(text.strip())
        except ValueError as exc:
            raise ParseError(f"not a numeric literal: {text!r}") from exc
        return cls.from_f32(float(f))

    def to_f32(self) -> float:
        """Widen exactly to binary32 (returned as a Python float)."""
        return float(self.to_np().astype(np.float32))

    def to_np(self) -> np.float16:
        return np.uint16(self._bits).view(np.float16)

    def is_nan(self) -> bool:
        return (self._bits & 0x7C00) == 0x7C00 and (self._bits & 0x03FF) != 0

    def is_inf(self) -> bool:
        return (self._bits & 0x7FFF) == 0x7C00

    def __add__(self, other: "Half") -> "Half":
        with np.errstate(over="ignore", invalid="ignore"):
            return Half.from_np(self.to_np() + other.to_np())

    def __mul__(self, other: "Half") -> "Half":
        with np.errstate(over="ignore", invalid="ignore"):
            return Half.from_np(self.to_np() * other.to_np())

    def __neg__(self) -> "Half":
        return Half(self._bits ^ 0x8000)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Half):
            return NotImplemented
        # IEEE semantics: NaN != NaN, +0 == -0.
        return bool(self.to_np() == other.to_np())

    def __hash__(self):
        return hash(self._bits)

    def __float__(self) -> float:
        return self.to_f32()

    def __repr__(self) -> str:
        return f"Half({self.to_f32()!r}, bits=0x{self._bits:04x})"

    def to_bytes(self) -> bytes:
        """Two little-endian bytes."""
        return self._bits.to_bytes(2, "little")

    @classmethod
    def from_bytes(cls, data: bytes) -> "Half":
        if len(data) != 2:
            raise ParseError("a binary16 scalar is exactly two bytes")
        return cls(int.from_bytes(data, "little"))


def add(a: Half, b: Half) -> Half:
    return a + b


def mul(a: Half, b: Half) -> Half:
    return a * b


# -- buffer helpers ---------------------------------------------------------

def halves_to_bytes(values: np.ndarray) -> bytes:
    """Serialize a float16 array as packed little-endian 16-bit words."""
    arr = np.ascontiguousarray(values, dtype=HALF)
    return arr.view(np.uint16).astype("<u2").tobytes()

def halves_from_bytes(data: bytes) -> np.ndarray:
    if len(data) % 2:
        raise ParseError("binary16 stream has an odd byte count")
    return np.frombuffer(data, dtype="<u2").astype(np.uint16).view(np.float16)

def parse_half_text(text: str) -> np.ndarray:
    """One decimal/scientific literal per line -> float16 array (via binary32)."""
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(np.float32(line))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: not a numeric literal: {line!r}") from exc
    return np.asarray(values, dtype=np.float32).astype(HALF)

def format_half_text(values: np.ndarray) -> str:
    arr = np.asarray(values)
    return "\n".join(repr(float(v)) for v in arr.astype(np.float32)) + "\n"
