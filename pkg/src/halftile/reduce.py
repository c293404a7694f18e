"""Segmented reduction built entirely from tile-engine MMAs.

Warp-level building blocks (one engine instance each):

* ``reduce_16``:   16 segments of 16 in one tile, 1 MMA.
* ``reduce_256``:  one 256-element segment, 2 MMAs.
* ``reduce_256n_efficient``:   a 256n segment, n + 1 MMAs (the row of
  column sums doubles as the running accumulator).
* ``reduce_256n_inefficient``: same values, 2n MMAs (a scalar collapse is
  repeated every iteration).
* ``reduce_16n_strided``:   16 segments of 16n per warp group; the lane
  group walks the segments with a leading dimension of 16n, n MMAs per
  group.
* ``reduce_16n_coalesced``: the same segment shape via contiguous chunk
  loads: each segment runs the work-efficient 256-chunk accumulation and
  one collapse, with the sub-256 tail of all 16 segments swept by shared
  strided passes.  MMAs per group: 16*(floor(n/16) + 1) + (n % 16) when
  n >= 16, else n (pure strided).

Block and grid levels compose the warp primitives: per-warp partials go
through an explicit scratch buffer with barrier-delimited phases, and a
full reduction is two passes over global buffers (segmented reduce to
partials, then a reduce of the partials).

Values are identical under any warp execution order and worker count:
warps only communicate through disjoint scratch slots between barriers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .engine import FragmentKind, Layout, TileEngine
from .errors import BadConfigError, BadLengthError
from .half import HALF
from .segmented import pad_segmented

GRID_REDUCE_PASSES = 2

REDUCE_VARIANTS = (
    "warp16",
    "warp256",
    "strided16n",
    "coalesced16n",
    "efficient256n",
    "inefficient256n",
    "block256n",
    "grid",
)


@dataclass(frozen=True)
class BlockConfig:
    """Block-level execution shape: warps per block and segments per warp."""

    wpb: int = 4
    coarsening: int = 1

    def __post_init__(self):
        if not 1 <= self.wpb <= 16:
            raise BadConfigError(f"warps per block must be in [1, 16], got {self.wpb}")
        if self.coarsening < 1:
            raise BadConfigError(f"coarsening must be positive, got {self.coarsening}")


def _as_flat_half(values) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=HALF)
    if arr.ndim != 1:
        raise BadLengthError("collectives operate on flat vectors")
    return arr


def _run_warps(tasks, workers: int, reverse: bool) -> None:
    """Execute one barrier-delimited phase of warp closures."""
    if reverse:
        tasks = list(reversed(tasks))
    if workers <= 1:
        for task in tasks:
            task()
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for f in [pool.submit(t) for t in tasks]:
                f.result()


# -- warp level ---------------------------------------------------------------


def reduce_16(values, engine: TileEngine) -> np.ndarray:
    """Sums of 16 consecutive segments of 16 elements (one tile, one MMA).

    The tile is loaded column-major so each segment lands in a column;
    left-multiplying by the first-row-ones tile collects the column sums
    into row 0.
    """
    values = _as_flat_half(values)
    if values.size != 256:
        raise BadLengthError(f"reduce_16 takes exactly 256 elements, got {values.size}")
    a = engine.load_tile(values, 0, Layout.COL_MAJOR, 16, FragmentKind.MATRIX_B)
    v = engine.mma(engine.first_row_ones(), a, engine.zero_acc())
    out = np.zeros(16, dtype=engine.acc_dtype)
    engine.store_first_row(v, out, 0)
    return out


def reduce_256(values, engine: TileEngine) -> np.number:
    """Total of one 256-element segment with exactly two MMAs."""
    values = _as_flat_half(values)
    if values.size != 256:
        raise BadLengthError(f"reduce_256 takes exactly 256 elements, got {values.size}")
    a = engine.load_tile(values, 0, Layout.COL_MAJOR, 16, FragmentKind.MATRIX_B)
    v = engine.mma(engine.first_row_ones(), a, engine.zero_acc())
    row = engine.cast_kind(v, FragmentKind.MATRIX_A)
    r = engine.mma(row, engine.first_col_ones(), engine.zero_acc())
    out = np.zeros(1, dtype=engine.acc_dtype)
    engine.store_element(r, 0, 0, out, 0)
    return out[0]


def reduce_256n_efficient(values, n: int, engine: TileEngine) -> np.number:
    """Total of a 256n segment in n + 1 MMAs.

    Each chunk's column sums accumulate into the same row; only the final
    row is collapsed to a scalar.
    """
    values = _as_flat_half(values)
    if n < 1 or values.size != 256 * n:
        raise BadLengthError(f"need exactly 256*{n} elements, got {values.size}")
    summing = engine.first_row_ones()
    v = engine.zero_acc()
    for i in range(n):
        a = engine.load_tile(values, 256 * i, Layout.COL_MAJOR, 16, FragmentKind.MATRIX_B)
        v = engine.mma(summing, a, v)
    row = engine.cast_kind(v, FragmentKind.MATRIX_A)
    r = engine.mma(row, engine.first_col_ones(), engine.zero_acc())
    out = np.zeros(1, dtype=engine.acc_dtype)
    engine.store_element(r, 0, 0, out, 0)
    return out[0]


def reduce_256n_inefficient(values, n: int, engine: TileEngine) -> np.number:
    """Total of a 256n segment in 2n MMAs.

    Every iteration collapses to a scalar and carries it in element (0, 0)
    of the next accumulator, spending one extra MMA per chunk compared to
    the efficient variant.  Values agree with the efficient variant
    whenever the arithmetic is exact.
    """
    values = _as_flat_half(values)
    if n < 1 or values.size != 256 * n:
        raise BadLengthError(f"need exactly 256*{n} elements, got {values.size}")
    summing = engine.first_row_ones()
    colsum = engine.first_col_ones()
    carry = engine.zero_acc()
    r = carry
    for i in range(n):
        a = engine.load_tile(values, 256 * i, Layout.COL_MAJOR, 16, FragmentKind.MATRIX_B)
        v = engine.mma(summing, a, engine.zero_acc())
        row = engine.cast_kind(v, FragmentKind.MATRIX_A)
        r = engine.mma(row, colsum, carry)
        if i < n - 1:
            carry = engine.scalar_at_origin(engine.read_element(r, 0, 0))
    out = np.zeros(1, dtype=engine.acc_dtype)
    engine.store_element(r, 0, 0, out, 0)
    return out[0]


def reduce_16n_strided(values, seg_size: int, engine: TileEngine) -> np.ndarray:
    """Per-segment sums for 16 segments of 16n per warp group, n MMAs each.

    Iteration i loads one 16-element slice of every segment in the group
    (column-major with a leading dimension of 16n) and accumulates the 16
    column sums in place.
    """
    values = _as_flat_half(values)
    n = seg_size // 16
    if seg_size < 16 or seg_size % 16:
        raise BadLengthError(f"segment size must be a positive multiple of 16, got {seg_size}")
    group = 256 * n
    if values.size == 0 or values.size % group:
        raise BadLengthError(
            f"input length {values.size} is not a multiple of the {group}-element warp group"
        )
    summing = engine.first_row_ones()
    out = np.zeros(values.size // seg_size, dtype=engine.acc_dtype)
    for g in range(values.size // group):
        base = g * group
        v = engine.zero_acc()
        for i in range(n):
            a = engine.load_tile(
                values, base + 16 * i, Layout.COL_MAJOR, seg_size, FragmentKind.MATRIX_B
            )
            v = engine.mma(summing, a, v)
        engine.store_first_row(v, out, g * 16)
    return out


def reduce_16n_coalesced(values, seg_size: int, engine: TileEngine) -> np.ndarray:
    """Per-segment sums with contiguous chunk loads instead of strided ones.

    Each segment's full 256-element chunks run the work-efficient
    accumulation and one scalar collapse; the sub-256 tails of the group's
    16 segments are swept together by strided passes, whose per-segment
    tail sums seed the collapse accumulators.
    """
    values = _as_flat_half(values)
    n = seg_size // 16
    if seg_size < 16 or seg_size % 16:
        raise BadLengthError(f"segment size must be a positive multiple of 16, got {seg_size}")
    group = 16 * seg_size
    if values.size == 0 or values.size % group:
        raise BadLengthError(
            f"input length {values.size} is not a multiple of the {group}-element warp group"
        )
    num_full = n // 16          # full 256-element chunks per segment
    tail16 = n % 16             # 16-element blocks left per segment
    summing = engine.first_row_ones()
    colsum = engine.first_col_ones() if num_full else None
    out = np.zeros(values.size // seg_size, dtype=engine.acc_dtype)
    for g in range(values.size // group):
        base = g * group
        # Shared strided sweep over the 16 tails: row 0, column s collects
        # the tail sum of segment s.
        tails = None
        if tail16:
            tails = engine.zero_acc()
            tail_base = base + 256 * num_full
            for i in range(tail16):
                a = engine.load_tile(
                    values, tail_base + 16 * i, Layout.COL_MAJOR, seg_size,
                    FragmentKind.MATRIX_B,
                )
                tails = engine.mma(summing, a, tails)
        if not num_full:
            engine.store_first_row(tails, out, g * 16)
            continue
        for s in range(16):
            sbase = base + s * seg_size
            v = engine.zero_acc()
            for i in range(num_full):
                a = engine.load_tile(
                    values, sbase + 256 * i, Layout.COL_MAJOR, 16, FragmentKind.MATRIX_B
                )
                v = engine.mma(summing, a, v)
            seed = (
                engine.scalar_at_origin(engine.read_element(tails, 0, s))
                if tails is not None
                else engine.zero_acc()
            )
            row = engine.cast_kind(v, FragmentKind.MATRIX_A)
            r = engine.mma(row, colsum, seed)
            engine.store_element(r, 0, 0, out, g * 16 + s)
    return out


def coalesced_group_mma_count(seg_size: int) -> int:
    """Closed-form MMA count of one coalesced 16-segment warp group."""
    n = seg_size // 16
    if n < 16:
        return n
    return 16 * (n // 16 + 1) + n % 16


def clamp_block_config(cfg: BlockConfig, n_tiles: int) -> BlockConfig:
    """Largest warp count <= cfg.wpb that divides the segment's tile count."""
    wpb = min(cfg.wpb, n_tiles)
    while n_tiles % wpb:
        wpb -= 1
    return cfg if wpb == cfg.wpb else BlockConfig(wpb=wpb, coarsening=cfg.coarsening)


# -- block level --------------------------------------------------------------


def block_reduce_256n(
    values,
    cfg: BlockConfig,
    engine: TileEngine,
    workers: int = 1,
    reverse: bool = False,
    debug_capture: dict | None = None,
) -> np.number:
    """Total of one 256n segment split across ``cfg.wpb`` warps.

    Phase 1: every warp runs the work-efficient reduction on its
    contiguous slice and drops the scalar into a shared partials buffer.
    After the barrier, warp 0 reduces the (zero-padded) partials with a
    single column-sum MMA.
    """
    values = _as_flat_half(values)
    wpb = cfg.wpb
    if values.size % 256:
        raise BadLengthError(f"segment length {values.size} is not a multiple of 256")
    n = values.size // 256
    if n % wpb:
        raise BadConfigError(f"{n} tiles do not divide across {wpb} warps")
    per_warp = values.size // wpb
    partials = np.zeros(16, dtype=engine.acc_dtype)
    warp_engines = [engine.spawn() for _ in range(wpb)]

    def warp_task(w):
        def run():
            eng = warp_engines[w]
            partials[w] = reduce_256n_efficient(
                values[w * per_warp:(w + 1) * per_warp], n // wpb, eng
            )
            eng.counters.elements_stored += 1  # lane-0 scalar write to shared memory
        return run

    _run_warps([warp_task(w) for w in range(wpb)], workers, reverse)
    for weng in warp_engines:
        engine.absorb(weng)
    if debug_capture is not None:
        debug_capture["partials"] = partials[:wpb].copy()
    # Barrier, then warp 0: one tile whose column 0 is the partials list.
    scratch = np.zeros(256, dtype=engine.acc_dtype)
    scratch[:wpb] = partials[:wpb]
    engine.counters.elements_loaded += wpb
    a = engine.load_tile(scratch, 0, Layout.COL_MAJOR, 16, FragmentKind.MATRIX_B)
    r = engine.mma(engine.first_row_ones(), a, engine.zero_acc())
    out = np.zeros(1, dtype=engine.acc_dtype)
    engine.store_element(r, 0, 0, out, 0)
    return out[0]


# -- grid level ---------------------------------------------------------------


def grid_reduce(
    values,
    engine: TileEngine,
    cfg: BlockConfig = BlockConfig(),
    block_elems: int = 4096,
    workers: int = 1,
    reverse: bool = False,
    debug_capture: dict | None = None,
) -> np.number:
    """Full reduction in exactly two passes over global buffers.

    Pass 1 reduces block-sized chunks to a partials list; pass 2 reduces
    the zero-padded partials with one warp.
    """
    values = _as_flat_half(values)
    if block_elems % (256 * cfg.wpb):
        raise BadConfigError(
            f"block capacity {block_elems} is not a multiple of 256*wpb ({256 * cfg.wpb})"
        )
    padded = pad_segmented(values, block_elems, seg_multiple=block_elems)
    n_blocks = padded.n_segments
    partials = np.zeros(n_blocks, dtype=engine.acc_dtype)
    block_engines = [engine.spawn() for _ in range(n_blocks)]

    def block_task(b):
        def run():
            chunk = padded.data[b * block_elems:(b + 1) * block_elems]
            partials[b] = block_reduce_256n(chunk, cfg, block_engines[b])
        return run

    _run_warps([block_task(b) for b in range(n_blocks)], workers, reverse)
    for beng in block_engines:
        engine.absorb(beng)
    passes = 1
    # Pass 2: one warp reduces the partials list.
    ppad = pad_segmented(partials.astype(HALF), n_blocks, seg_multiple=256)
    total = reduce_256n_efficient(ppad.data, ppad.data.size // 256, engine)
    passes += 1
    if debug_capture is not None:
        debug_capture["passes"] = passes
        debug_capture["partials"] = partials.copy()
    return total


# -- segmented driver ---------------------------------------------------------


def segmented_reduce(
    values,
    seg_size: int,
    variant: str,
    engine: TileEngine,
    cfg: BlockConfig = BlockConfig(),
    workers: int = 1,
    reverse: bool = False,
) -> np.ndarray:
    """Apply one reduction variant over a whole segmented vector.

    Handles padding (segments to the variant's multiple, warp groups to 16
    segments), dispatches per segment/group/block, and returns one sum per
    logical segment.
    """
    values = _as_flat_half(values)
    if variant == "grid":
        total = grid_reduce(values, engine, cfg=cfg, workers=workers, reverse=reverse)
        return np.array([total], dtype=engine.acc_dtype)
    if variant == "warp16":
        if seg_size != 16:
            raise BadConfigError("warp16 reduces segments of exactly 16")
        sv = pad_segmented(values, 16, seg_multiple=16, count_multiple=16)
        sums = np.concatenate([
            reduce_16(sv.data[i:i + 256], engine) for i in range(0, sv.data.size, 256)
        ])
        return sv.unpad_sums(sums)
    if variant == "warp256":
        if seg_size != 256:
            raise BadConfigError("warp256 reduces segments of exactly 256")
        sv = pad_segmented(values, 256, seg_multiple=256)
        sums = np.array(
            [reduce_256(sv.data[i:i + 256], engine) for i in range(0, sv.data.size, 256)],
            dtype=engine.acc_dtype,
        )
        return sv.unpad_sums(sums)
    if variant in ("strided16n", "coalesced16n"):
        sv = pad_segmented(values, seg_size, seg_multiple=16, count_multiple=16)
        fn = reduce_16n_strided if variant == "strided16n" else reduce_16n_coalesced
        sums = fn(sv.data, sv.seg_size, engine)
        return sv.unpad_sums(sums)
    if variant in ("efficient256n", "inefficient256n"):
        sv = pad_segmented(values, seg_size, seg_multiple=256)
        n = sv.seg_size // 256
        fn = reduce_256n_efficient if variant == "efficient256n" else reduce_256n_inefficient
        sums = np.array(
            [
                fn(sv.data[s * sv.seg_size:(s + 1) * sv.seg_size], n, engine)
                for s in range(sv.n_segments)
            ],
            dtype=engine.acc_dtype,
        )
        return sv.unpad_sums(sums)
    if variant == "block256n":
        sv = pad_segmented(values, seg_size, seg_multiple=256)
        cfg_eff = clamp_block_config(cfg, sv.seg_size // 256)
        sums = np.array(
            [
                block_reduce_256n(
                    sv.data[s * sv.seg_size:(s + 1) * sv.seg_size], cfg_eff, engine,
                    workers=workers, reverse=reverse,
                )
                for s in range(sv.n_segments)
            ],
            dtype=engine.acc_dtype,
        )
        return sv.unpad_sums(sums)
    raise BadConfigError(f"unknown reduce variant {variant!r}; pick from {REDUCE_VARIANTS}")
