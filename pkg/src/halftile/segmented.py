"""Segment padding for the fixed-shape tile collectives.

Arbitrary segment sizes are supported by zero-padding each segment up to
the multiple the chosen algorithm needs (16 for the strided family, 256
or 256*wpb for the chunked families), and by padding the segment count up
to a full warp group where the layout interleaves 16 segments per tile.
Appended zeros are the additive identity, so sums and the retained scan
prefix are unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadLengthError
from .half import HALF


@dataclass
class SegmentedVector:
    """A zero-padded flat buffer of equal-size segments.

    ``data`` holds ``n_segments * seg_size`` elements where ``seg_size``
    is the padded segment size; everything beyond a segment's logical
    prefix is zero.
    """

    data: np.ndarray
    seg_size: int
    logical_len: int
    logical_seg_size: int

    @property
    def n_segments(self) -> int:
        return self.data.size // self.seg_size

    @property
    def n_logical_segments(self) -> int:
        return -(-self.logical_len // self.logical_seg_size)

    @property
    def padded_elements(self) -> int:
        return self.data.size - self.logical_len

    def unpad_scan(self, scanned: np.ndarray) -> np.ndarray:
        """Drop the padded positions from a scan over ``data``."""
        segs = scanned.reshape(self.n_segments, self.seg_size)
        kept = segs[: self.n_logical_segments, : self.logical_seg_size].reshape(-1)
        return kept[: self.logical_len]

    def unpad_sums(self, sums: np.ndarray) -> np.ndarray:
        return sums[: self.n_logical_segments]


def pad_segmented(
    values: np.ndarray,
    seg_size: int,
    seg_multiple: int = 16,
    count_multiple: int = 1,
) -> SegmentedVector:
    """Zero-pad ``values`` to uniform segments of a multiple of ``seg_multiple``.

    The final partial segment is padded too, and the segment count is
    rounded up to ``count_multiple`` (whole zero segments) so warp groups
    are always full.
    """
    values = np.ascontiguousarray(values, dtype=HALF)
    if values.ndim != 1 or values.size == 0:
        raise BadLengthError("input must be a non-empty flat vector")
    if seg_size < 1:
        raise BadLengthError(f"segment size must be positive, got {seg_size}")
    padded_seg = -(-seg_size // seg_multiple) * seg_multiple
    n_logical = -(-values.size // seg_size)
    n_segs = -(-n_logical // count_multiple) * count_multiple
    out = np.zeros((n_segs, padded_seg), dtype=HALF)
    full = values.size // seg_size
    if full:
        out[:full, :seg_size] = values[: full * seg_size].reshape(full, seg_size)
    rem = values.size - full * seg_size
    if rem:
        out[full, :rem] = values[full * seg_size:]
    return SegmentedVector(
        data=out.reshape(-1),
        seg_size=padded_seg,
        logical_len=values.size,
        logical_seg_size=seg_size,
    )
