"""Scalar ground-truth oracles and the warp-shuffle baseline.

Two oracle modes:

* ``exact``: binary64 accumulation, order-independent for every integer
  workload far below 2^53.
* ``faithful_half``: binary16 rounding after every scalar add, strictly
  left to right within each segment — the behaviour of a sequential
  half-precision loop.

The shuffle baseline mirrors the conventional warp collectives built from
register-shuffle instructions, together with their cycle cost model: a
warp-level reduction of 256 elements is charged 256 cycles (a constant of
the model, not derived here), while individual 32-lane passes are counted
as 5 shuffle-plus-add steps at 4 cycles each.  The two figures are
reported separately and never mixed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadLengthError
from .half import HALF

EXACT = "exact"
FAITHFUL_HALF = "faithful_half"

#: Modeled cost of one shuffle-based 256-element warp reduction.
SHUFFLE_REDUCE_256_CYCLES = 256

#: Each shuffle instruction plus its dependent add takes this many cycles.
CYCLES_PER_SHUFFLE_STEP = 4


def _segments(values: np.ndarray, seg_size: int) -> np.ndarray:
    values = np.asarray(values)
    if seg_size < 1 or values.size % seg_size:
        raise BadLengthError(
            f"length {values.size} is not a multiple of segment size {seg_size}"
        )
    return values.reshape(-1, seg_size)


def oracle_segmented_reduce(values, seg_size: int, mode: str = EXACT) -> np.ndarray:
    """Per-segment sums; binary64 result for ``exact``, binary16 for
    ``faithful_half``."""
    segs = _segments(values, seg_size)
    if mode == EXACT:
        return segs.astype(np.float64).sum(axis=1)
    if mode == FAITHFUL_HALF:
        # cumsum on float16 rounds every partial; the tail entry is the sum
        # in strict left-to-right order (add.reduce would re-associate).
        return np.cumsum(segs.astype(HALF), axis=1)[:, -1]
    raise ValueError(f"unknown oracle mode {mode!r}")


def oracle_segmented_scan(
    values, seg_size: int, mode: str = EXACT, inclusive: bool = True
) -> np.ndarray:
    """Per-segment prefix sums, flattened back to the input length."""
    segs = _segments(values, seg_size)
    if mode == EXACT:
        out = np.cumsum(segs.astype(np.float64), axis=1)
    elif mode == FAITHFUL_HALF:
        out = np.cumsum(segs.astype(HALF), axis=1)
    else:
        raise ValueError(f"unknown oracle mode {mode!r}")
    if not inclusive:
        shifted = np.zeros_like(out)
        shifted[:, 1:] = out[:, :-1]
        out = shifted
    return out.reshape(-1)


@dataclass
class ShuffleCost:
    """Step tallies for the shuffle baseline (4 cycles per step)."""

    shuffle_ops: int = 0
    add_ops: int = 0

    @property
    def step_cycles(self) -> int:
        return CYCLES_PER_SHUFFLE_STEP * self.shuffle_ops


def shuffle_warp_reduce(vals) -> tuple[np.float16, ShuffleCost]:
    """Tree reduction over 32 lanes via shift-down exchanges.

    After each step, lane i holds ``vals[i] + vals[i + offset]`` for lanes
    that have a peer; lane 0 ends up with the full sum.  Adds round to
    binary16 at every step.
    """
    vals = np.asarray(vals, dtype=HALF).copy()
    if vals.shape != (32,):
        raise BadLengthError("shuffle_warp_reduce takes exactly 32 lane values")
    cost = ShuffleCost()
    offset = 16
    while offset > 0:
        shifted = np.zeros_like(vals)
        shifted[:32 - offset] = vals[offset:]
        vals = vals + shifted
        cost.shuffle_ops += 1
        cost.add_ops += 1
        offset //= 2
    return vals[0], cost


def shuffle_warp_scan(vals) -> tuple[np.ndarray, ShuffleCost]:
    """Inclusive Hillis-Steele scan over 32 lanes via shift-up exchanges."""
    vals = np.asarray(vals, dtype=HALF).copy()
    if vals.shape != (32,):
        raise BadLengthError("shuffle_warp_scan takes exactly 32 lane values")
    cost = ShuffleCost()
    offset = 1
    while offset < 32:
        received = np.zeros_like(vals)
        received[offset:] = vals[:32 - offset]
        vals[offset:] = vals[offset:] + received[offset:]
        cost.shuffle_ops += 1
        cost.add_ops += 1
        offset *= 2
    return vals, cost


def shuffle_reduce_256_cost() -> int:
    """Cycle cost of reducing one 256-element chunk with warp shuffles."""
    return SHUFFLE_REDUCE_256_CYCLES
