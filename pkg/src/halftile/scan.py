"""Segmented inclusive scan built entirely from tile-engine MMAs.

The tile identities (all on 16x16 tiles):

* right-multiplying by the upper-triangular ones tile turns each row into
  its inclusive prefix sums;
* left-multiplying by the strictly-lower-triangular ones tile turns each
  column into its exclusive prefix sums;
* multiplying that result by the all-ones tile broadcasts, into every row
  r, the grand total of all rows before r;
* adding the two gives the inclusive scan of the 256 elements read in
  linear row-major order.

Warp-level entry points:

* ``scan_16``:  16 independent rows of 16, 1 MMA.
* ``scan_256``: one 256-element segment, 3 MMAs.
* ``scan_16n``: 16 segments of 16n per warp group, strided tiles, n MMAs
  per group; the carry is the per-row broadcast of each tile's last
  column.
* ``scan_256n``: one 256n segment, 3n MMAs; the carry is the broadcast of
  each tile's element (15, 15), the running total.

The block level scans ``wpb`` tiles per super-iteration through a shared
scratch buffer, collapses the per-warp totals with a tile-based exclusive
scan (``last_column_scan_16``), and uniform-adds the offsets back; the
grid level is the three-pass scan-then-propagate composition.

Inclusive scan is the primary contract; exclusive outputs are derived by
shifting in a leading zero.
"""

from __future__ import annotations

import numpy as np

from .engine import Fragment, FragmentKind, Layout, TileEngine
from .errors import BadConfigError, BadLengthError
from .half import HALF
from .reduce import BlockConfig, _as_flat_half, _run_warps, clamp_block_config
from .segmented import pad_segmented

GRID_SCAN_PASSES = 3

SCAN_VARIANTS = (
    "warp16",
    "warp256",
    "strided16n",
    "warp256n",
    "block256n",
    "grid",
)


# -- warp level ---------------------------------------------------------------


def scan_16(values, engine: TileEngine) -> np.ndarray:
    """Inclusive prefix sums of 16 consecutive segments of 16 (one MMA).

    Segments occupy the rows of a row-major tile; contrast the reduction
    path, which loads column-major.
    """
    values = _as_flat_half(values)
    if values.size != 256:
        raise BadLengthError(f"scan_16 takes exactly 256 elements, got {values.size}")
    a = engine.load_tile(values, 0, Layout.ROW_MAJOR, 16, FragmentKind.MATRIX_A)
    r = engine.mma(a, engine.upper_ones(), engine.zero_acc())
    out = np.zeros(256, dtype=engine.acc_dtype)
    engine.store_tile(r, out, 0, Layout.ROW_MAJOR, 16)
    return out


class _ScanTiles:
    """Constant fragments one warp reuses across scan iterations."""

    def __init__(self, engine: TileEngine):
        self.engine = engine
        self.upper = engine.upper_ones()
        self.lower = engine.strict_lower_ones()
        self.ones = engine.all_ones()

    def scan_tile(self, values: np.ndarray, offset: int, carry: Fragment) -> Fragment:
        """Scan 256 row-major elements at ``offset`` seeded by ``carry``."""
        eng = self.engine
        a = eng.load_tile(values, offset, Layout.ROW_MAJOR, 16, FragmentKind.MATRIX_A)
        b = eng.load_tile(values, offset, Layout.ROW_MAJOR, 16, FragmentKind.MATRIX_B)
        row_scans = eng.mma(a, self.upper, carry)
        col_excl = eng.mma(self.lower, b, eng.zero_acc())
        rows_before = eng.cast_kind(col_excl, FragmentKind.MATRIX_A)
        return eng.mma(rows_before, self.ones, row_scans)


def scan_256(values, engine: TileEngine) -> np.ndarray:
    """Inclusive scan of one 256-element segment in exactly 3 MMAs.

    Element (15, 15) of the result tile is the segment total.
    """
    return scan_256n(values, 1, engine)


def scan_256n(values, n: int, engine: TileEngine) -> np.ndarray:
    """Inclusive scan of one 256n segment in exactly 3n MMAs.

    Between chunks, the running total (element (15, 15) of the result) is
    broadcast into the next chunk's accumulator seed.
    """
    values = _as_flat_half(values)
    if n < 1 or values.size != 256 * n:
        raise BadLengthError(f"need exactly 256*{n} elements, got {values.size}")
    tiles = _ScanTiles(engine)
    carry = engine.zero_acc()
    out = np.zeros(values.size, dtype=engine.acc_dtype)
    for i in range(n):
        r = tiles.scan_tile(values, 256 * i, carry)
        engine.store_tile(r, out, 256 * i, Layout.ROW_MAJOR, 16)
        if i < n - 1:
            carry = engine.broadcast_element(r, 15, 15)
    return out


def scan_16n(values, seg_size: int, engine: TileEngine) -> np.ndarray:
    """Inclusive scans of 16 segments of 16n per warp group, n MMAs each.

    Iteration i loads a row-major tile with leading dimension 16n (row r
    holds elements [16i, 16i+16) of segment r), scans the rows, stores the
    tile back with the same indexing, and broadcasts the tile's last
    column as the per-row carry.
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
    upper = engine.upper_ones()
    out = np.zeros(values.size, dtype=engine.acc_dtype)
    for g in range(values.size // group):
        base = g * group
        carry = engine.zero_acc()
        for i in range(n):
            a = engine.load_tile(
                values, base + 16 * i, Layout.ROW_MAJOR, seg_size, FragmentKind.MATRIX_A
            )
            r = engine.mma(a, upper, carry)
            engine.store_tile(r, out, base + 16 * i, Layout.ROW_MAJOR, seg_size)
            if i < n - 1:
                carry = engine.broadcast_last_column(r)
    return out


def last_column_scan_16(frag: Fragment, engine: TileEngine, carry: float = 0.0) -> np.ndarray:
    """Exclusive scan of a tile's last column, computed on the tile unit.

    The column is re-loaded as the first row of a fresh tile (a row load
    honours the alignment the fragment loader requires, a column load
    would not) and right-multiplied by the strictly-upper-triangular ones
    tile; ``carry`` seeds every output.  One MMA.
    """
    col = engine.read_last_column(frag)
    scratch = np.zeros(256, dtype=HALF)
    scratch[:16] = col.astype(HALF)
    engine.counters.elements_stored += 16
    a = engine.load_tile(scratch, 0, Layout.ROW_MAJOR, 16, FragmentKind.MATRIX_A)
    seed = engine.fill(value=carry)
    r = engine.mma(a, engine.strict_upper_ones(), seed)
    out = np.zeros(16, dtype=engine.acc_dtype)
    engine.store_first_row(r, out, 0)
    return out


# -- block level --------------------------------------------------------------


def block_scan_256n(
    values,
    cfg: BlockConfig,
    engine: TileEngine,
    workers: int = 1,
    reverse: bool = False,
    debug_capture: dict | None = None,
) -> np.ndarray:
    """Inclusive scan of one 256n segment using ``cfg.wpb`` warps.

    Per super-iteration: each warp scans its tile (unseeded) into a shared
    scratch buffer; after the barrier, warp 0 loads the scratch at offset
    240 with leading dimension 256 (the last row of every tile), runs the
    exclusive ``last_column_scan_16`` seeded with the running carry, and
    the warps uniform-add their partial offset while storing out.  The
    next carry is the exclusive value at slot 15 plus the last tile's
    total, which reduces to slot 15 alone whenever wpb < 16 because the
    unused scratch rows stay zero.
    """
    values = _as_flat_half(values)
    wpb = cfg.wpb
    if values.size % 256:
        raise BadLengthError(f"segment length {values.size} is not a multiple of 256")
    n = values.size // 256
    if n % wpb:
        raise BadConfigError(f"{n} tiles do not divide across {wpb} warps")
    sout = np.zeros(256 * 16, dtype=engine.acc_dtype)
    out = np.zeros(values.size, dtype=engine.acc_dtype)
    warp_engines = [engine.spawn() for _ in range(wpb)]
    warp_tiles = [_ScanTiles(weng) for weng in warp_engines]
    carry = engine.acc_dtype.type(0)
    first_capture = True
    for i0 in range(0, n, wpb):

        def scan_task(w):
            def run():
                eng = warp_engines[w]
                r = warp_tiles[w].scan_tile(values, 256 * (i0 + w), eng.zero_acc())
                eng.store_tile(r, sout, 256 * w, Layout.ROW_MAJOR, 16)
            return run

        _run_warps([scan_task(w) for w in range(wpb)], workers, reverse)
        # Barrier; warp 0 collapses the per-tile totals.
        last_rows = engine.load_tile(sout, 240, Layout.ROW_MAJOR, 256, FragmentKind.MATRIX_A)
        prtls = last_column_scan_16(last_rows, engine, carry=float(carry))
        tail_total = engine.read_element(last_rows, 15, 15)
        if debug_capture is not None and first_capture:
            debug_capture["first_prtls"] = prtls.copy()
            debug_capture["first_sout"] = sout.copy()
            first_capture = False

        # Barrier; every warp uniform-adds its offset from the partials.
        def add_task(w):
            def run():
                eng = warp_engines[w]
                base = 256 * (i0 + w)
                out[base:base + 256] = sout[256 * w:256 * w + 256] + prtls[w]
                eng.counters.elements_loaded += 257
                eng.counters.elements_stored += 256
            return run

        _run_warps([add_task(w) for w in range(wpb)], workers, reverse)
        carry = engine.acc_dtype.type(prtls[15] + engine.acc_dtype.type(tail_total))
    for weng in warp_engines:
        engine.absorb(weng)
    return out


# -- grid level ---------------------------------------------------------------


def grid_scan(
    values,
    engine: TileEngine,
    cfg: BlockConfig = BlockConfig(),
    block_elems: int = 4096,
    workers: int = 1,
    reverse: bool = False,
    debug_capture: dict | None = None,
) -> np.ndarray:
    """Inclusive scan of the whole vector: scan, scan the totals, propagate.

    Pass 1 block-scans every chunk and collects the block totals; pass 2
    scans the (zero-padded) totals with one warp; pass 3 uniform-adds each
    block's exclusive offset.  Exactly three passes over global buffers.
    """
    values = _as_flat_half(values)
    if block_elems % (256 * cfg.wpb):
        raise BadConfigError(
            f"block capacity {block_elems} is not a multiple of 256*wpb ({256 * cfg.wpb})"
        )
    padded = pad_segmented(values, block_elems, seg_multiple=block_elems)
    n_blocks = padded.n_segments
    inter = np.zeros(padded.data.size, dtype=engine.acc_dtype)
    totals = np.zeros(n_blocks, dtype=engine.acc_dtype)
    block_engines = [engine.spawn() for _ in range(n_blocks)]

    def scan_block(b):
        def run():
            eng = block_engines[b]
            chunk = padded.data[b * block_elems:(b + 1) * block_elems]
            inter[b * block_elems:(b + 1) * block_elems] = block_scan_256n(chunk, cfg, eng)
            totals[b] = inter[(b + 1) * block_elems - 1]
            eng.counters.elements_loaded += 1
        return run

    _run_warps([scan_block(b) for b in range(n_blocks)], workers, reverse)
    passes = 1

    tpad = pad_segmented(totals.astype(HALF), n_blocks, seg_multiple=256)
    totals_scan = scan_256n(tpad.data, tpad.data.size // 256, engine)
    passes += 1

    offsets = np.zeros(n_blocks, dtype=engine.acc_dtype)
    offsets[1:] = totals_scan[:n_blocks - 1]

    def propagate(b):
        def run():
            eng = block_engines[b]
            lo, hi = b * block_elems, (b + 1) * block_elems
            inter[lo:hi] = inter[lo:hi] + offsets[b]
            eng.counters.elements_loaded += block_elems + 1
            eng.counters.elements_stored += block_elems
        return run

    _run_warps([propagate(b) for b in range(n_blocks)], workers, reverse)
    for beng in block_engines:
        engine.absorb(beng)
    passes += 1
    if debug_capture is not None:
        debug_capture["passes"] = passes
        debug_capture["block_totals"] = totals.copy()
    return inter[: values.size]


# -- segmented driver ---------------------------------------------------------


def segmented_scan(
    values,
    seg_size: int,
    variant: str,
    engine: TileEngine,
    cfg: BlockConfig = BlockConfig(),
    workers: int = 1,
    reverse: bool = False,
    inclusive: bool = True,
) -> np.ndarray:
    """Apply one scan variant over a whole segmented vector.

    Returns the per-segment inclusive prefix sums at the logical length;
    ``inclusive=False`` shifts each segment right and injects a zero.
    """
    values = _as_flat_half(values)
    out = _segmented_scan_inclusive(values, seg_size, variant, engine, cfg, workers, reverse)
    if not inclusive:
        segs = out.reshape(-1, seg_size) if values.size % seg_size == 0 else None
        if segs is None:
            raise BadLengthError(
                "exclusive output needs the logical length to be a segment multiple"
            )
        shifted = np.zeros_like(segs)
        shifted[:, 1:] = segs[:, :-1]
        return shifted.reshape(-1)
    return out


def _segmented_scan_inclusive(values, seg_size, variant, engine, cfg, workers, reverse):
    if variant == "grid":
        if seg_size < values.size:
            raise BadConfigError("the grid variant scans the whole input as one segment")
        return grid_scan(values, engine, cfg=cfg, workers=workers, reverse=reverse)
    if variant == "warp16":
        if seg_size != 16:
            raise BadConfigError("warp16 scans segments of exactly 16")
        sv = pad_segmented(values, 16, seg_multiple=16, count_multiple=16)
        out = np.concatenate([
            scan_16(sv.data[i:i + 256], engine) for i in range(0, sv.data.size, 256)
        ])
        return sv.unpad_scan(out)
    if variant == "warp256":
        if seg_size != 256:
            raise BadConfigError("warp256 scans segments of exactly 256")
        sv = pad_segmented(values, 256, seg_multiple=256)
        out = np.concatenate([
            scan_256(sv.data[i:i + 256], engine) for i in range(0, sv.data.size, 256)
        ])
        return sv.unpad_scan(out)
    if variant == "strided16n":
        sv = pad_segmented(values, seg_size, seg_multiple=16, count_multiple=16)
        return sv.unpad_scan(scan_16n(sv.data, sv.seg_size, engine))
    if variant == "warp256n":
        sv = pad_segmented(values, seg_size, seg_multiple=256)
        n = sv.seg_size // 256
        out = np.concatenate([
            scan_256n(sv.data[s * sv.seg_size:(s + 1) * sv.seg_size], n, engine)
            for s in range(sv.n_segments)
        ])
        return sv.unpad_scan(out)
    if variant == "block256n":
        sv = pad_segmented(values, seg_size, seg_multiple=256)
        cfg_eff = clamp_block_config(cfg, sv.seg_size // 256)
        out = np.concatenate([
            block_scan_256n(
                sv.data[s * sv.seg_size:(s + 1) * sv.seg_size], cfg_eff, engine,
                workers=workers, reverse=reverse,
            )
            for s in range(sv.n_segments)
        ])
        return sv.unpad_scan(out)
    raise BadConfigError(f"unknown scan variant {variant!r}; pick from {SCAN_VARIANTS}")
