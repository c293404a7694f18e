"""Algorithm selection by segment size.

The default thresholds follow the tuned crossover points of the tile
algorithms on real hardware: below 256 the strided 16-multiple family
wins, between 256 and 2^15 the chunked 256-multiple family, and beyond
2^15 the block-level composition.  They were measured on hardware this
simulator does not model, so both are overridable (the block threshold
also via the ``TCU_THRESHOLD_BLOCK`` environment variable).

Selection is a pure function of (op, segment size, total length): equal
inputs always yield equal plans.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import BadConfigError

WARP_THRESHOLD = 256
BLOCK_THRESHOLD = 2 ** 15
BLOCK_THRESHOLD_ENV = "TCU_THRESHOLD_BLOCK"

DEFAULT_WPB = 4


@dataclass(frozen=True)
class ExecPlan:
    """A chosen algorithm variant plus its launch-shape parameters."""

    op: str
    variant: str
    wpb: int = DEFAULT_WPB
    coarsening: int = 1
    tile_shape: tuple[int, int, int] = (16, 16, 16)


def block_threshold(override: int | None = None) -> int:
    if override is not None:
        return override
    env = os.environ.get(BLOCK_THRESHOLD_ENV)
    return int(env) if env else BLOCK_THRESHOLD


def select_algorithm(
    op: str,
    seg_size: int,
    total_len: int | None = None,
    wpb: int = DEFAULT_WPB,
    block_thresh: int | None = None,
) -> ExecPlan:
    """Pick the variant for one (op, segment size) pair.

    A segment spanning the whole input becomes the multi-pass grid
    operation; otherwise the size ranges decide: exact warp shapes at 16
    and 256, the strided family below 256, the chunked family up to the
    block threshold, and the block level beyond it.
    """
    if op not in ("reduce", "scan"):
        raise BadConfigError(f"op must be 'reduce' or 'scan', got {op!r}")
    if seg_size < 1:
        raise BadConfigError(f"segment size must be positive, got {seg_size}")
    thresh = block_threshold(block_thresh)
    if total_len is not None and seg_size >= total_len:
        variant = "grid"
    elif seg_size == 16:
        variant = "warp16"
    elif seg_size < WARP_THRESHOLD:
        variant = "strided16n"
    elif seg_size == 256:
        variant = "warp256"
    elif seg_size <= thresh:
        variant = "efficient256n" if op == "reduce" else "warp256n"
    else:
        variant = "block256n"
    return ExecPlan(op=op, variant=variant, wpb=wpb)
