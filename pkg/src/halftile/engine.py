"""Functional simulation of a warp-level MMA tile engine.

The model follows the WMMA programming style: a warp owns opaque
*fragments* (register tiles of kind matrix_a / matrix_b / accumulator),
moves them to and from linear buffers with ``load_tile`` / ``store_tile``,
fills them with scalars, and combines them with a fused
multiply-accumulate ``d = a @ b + c``.  Inputs are binary16; accumulators
are binary16 or binary32.

Every data movement and MMA is tallied in :class:`CostCounters`; the cycle
estimate charges 32 cycles per MMA.

Two API modes are simulated:

* ``relaxed`` (default): the engine may populate constant fragments and
  read single rows/columns/elements directly, modelling layout-aware API
  extensions.
* strict: everything except ``fill`` with a uniform scalar must round-trip
  through a memory buffer at fragment granularity, so constant tiles cost
  a tile load and partial reads cost a full tile store.

Both modes produce identical values; only the counters differ.

The mapping from matrix coordinates to (lane, slot) register ownership is
deliberately engine-defined (real hardware keeps it opaque): element
``(r, c)`` of a tile with ``cols`` columns lives in
``lane = (r // 4) * (cols // 4) + (c // 4)`` at
``slot = (r % 4) * 4 + (c % 4)``, i.e. lanes own aligned 4x4 sub-blocks.
Any bijection preserves the algorithm semantics; this one is chosen for
being easy to reason about.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields
from functools import lru_cache

import numpy as np

from .errors import (
    InvalidStrideError,
    OutOfBoundsError,
    ShapeMismatchError,
    WrongKindError,
)
from .half import HALF

WARP_LANES = 32

#: Tile shapes the MMA unit accepts, as (m, n, k).
SUPPORTED_SHAPES = ((16, 16, 16), (32, 8, 16), (8, 32, 16))


class FragmentKind(enum.Enum):
    MATRIX_A = "matrix_a"
    MATRIX_B = "matrix_b"
    ACCUMULATOR = "accumulator"


class Layout(enum.Enum):
    ROW_MAJOR = "row_major"
    COL_MAJOR = "col_major"


@dataclass(frozen=True)
class TileShape:
    """An (m, n, k) MMA tile shape: (m x k) @ (k x n) + (m x n)."""

    m: int
    n: int
    k: int

    def __post_init__(self):
        if (self.m, self.n, self.k) not in SUPPORTED_SHAPES:
            raise ShapeMismatchError(
                f"unsupported tile shape {(self.m, self.n, self.k)}; "
                f"must be one of {SUPPORTED_SHAPES}"
            )

    def dims(self, kind: FragmentKind) -> tuple[int, int]:
        """(rows, cols) of the matrix held by a fragment of ``kind``."""
        if kind is FragmentKind.MATRIX_A:
            return self.m, self.k
        if kind is FragmentKind.MATRIX_B:
            return self.k, self.n
        return self.m, self.n


SHAPE_16 = TileShape(16, 16, 16)
SHAPE_32x8 = TileShape(32, 8, 16)
SHAPE_8x32 = TileShape(8, 32, 16)


@dataclass
class CostCounters:
    """Operation tallies for one engine instance.

    ``cycle_estimate`` charges 32 cycles per MMA, the issue latency of one
    warp-wide tile multiply-accumulate.
    """

    mma_count: int = 0
    tile_loads: int = 0
    tile_stores: int = 0
    fill_count: int = 0
    elements_loaded: int = 0
    elements_stored: int = 0

    CYCLES_PER_MMA = 32

    @property
    def cycle_estimate(self) -> int:
        return self.CYCLES_PER_MMA * self.mma_count

    def merge(self, other: "CostCounters") -> None:
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))

    def snapshot(self) -> "CostCounters":
        return CostCounters(**{f.name: getattr(self, f.name) for f in fields(self)})

    def delta(self, since: "CostCounters") -> "CostCounters":
        return CostCounters(
            **{f.name: getattr(self, f.name) - getattr(since, f.name) for f in fields(self)}
        )


def lane_of(rows: int, cols: int, r: int, c: int) -> tuple[int, int]:
    """(lane, slot) owning element (r, c) of a rows x cols fragment."""
    return (r // 4) * (cols // 4) + (c // 4), (r % 4) * 4 + (c % 4)


class Fragment:
    """An opaque lane-distributed tile.

    User code must not touch ``_data`` directly; go through the engine so
    the cost model stays honest.  Tests may read ``matrix`` (a copy).
    """

    __slots__ = ("kind", "shape", "_data")

    def __init__(self, kind: FragmentKind, shape: TileShape, data: np.ndarray):
        rows, cols = shape.dims(kind)
        if data.shape != (rows, cols):
            raise ShapeMismatchError(
                f"{kind.value} fragment of shape {shape} needs a {rows}x{cols} matrix"
            )
        if kind is not FragmentKind.ACCUMULATOR and data.dtype != HALF:
            raise WrongKindError("matrix_a / matrix_b fragments are always binary16")
        self.kind = kind
        self.shape = shape
        self._data = data

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def dtype(self) -> np.dtype:
        return self._data.dtype

    @property
    def matrix(self) -> np.ndarray:
        """Debug copy of the held matrix (tests / dumps only)."""
        return self._data.copy()

    def lane_elements(self, lane: int) -> np.ndarray:
        """Elements owned by ``lane`` in slot order (debug view of the lane map)."""
        rows, cols = self._data.shape
        out = []
        for r in range(rows):
            for c in range(cols):
                ln, slot = lane_of(rows, cols, r, c)
                if ln == lane:
                    out.append((slot, self._data[r, c]))
        out.sort()
        return np.array([v for _, v in out], dtype=self._data.dtype)


def fragment_text(frag: Fragment) -> str:
    """Row-major decimal grid, one tile row per line (golden-test format)."""
    lines = []
    for row in frag._data.astype(np.float64):
        lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


@lru_cache(maxsize=256)
def _index_grid(rows: int, cols: int, layout: Layout, stride: int) -> np.ndarray:
    """Element offsets of a rows x cols tile at the given leading dimension.

    Cached and returned read-only; callers add the base offset themselves.
    """
    if layout is Layout.ROW_MAJOR:
        if stride < cols:
            raise InvalidStrideError(f"stride {stride} < row length {cols}")
        grid = stride * np.arange(rows)[:, None] + np.arange(cols)[None, :]
    else:
        if stride < rows:
            raise InvalidStrideError(f"stride {stride} < column length {rows}")
        grid = np.arange(rows)[:, None] + stride * np.arange(cols)[None, :]
    grid.setflags(write=False)
    return grid


@dataclass
class _LoadRecord:
    """One load_tile call, kept when tracing is on."""

    offset: int
    layout: Layout
    stride: int
    kind: FragmentKind


class TileEngine:
    """One warp's view of the MMA unit: fragments plus cost counters.

    An engine instance is single-threaded.  Independent instances may run
    concurrently; merge their counters explicitly with
    ``counters.merge(other.counters)``.

    ``accumulate`` selects the precision of accumulator fragments the
    engine creates ("half" or "single"); loads of matrix_a / matrix_b are
    always binary16.
    """

    def __init__(self, relaxed: bool = True, accumulate: str = "half", trace: bool = False):
        if accumulate not in ("half", "single"):
            raise ValueError("accumulate must be 'half' or 'single'")
        self.relaxed = relaxed
        self.accumulate = accumulate
        self.counters = CostCounters()
        self.load_trace: list[_LoadRecord] = [] if trace else None
        self._trace = trace

    # -- helpers ------------------------------------------------------------

    @property
    def acc_dtype(self) -> np.dtype:
        return np.dtype(np.float32) if self.accumulate == "single" else HALF

    def spawn(self) -> "TileEngine":
        """A sibling engine (same mode) with fresh counters, e.g. one per warp."""
        return TileEngine(relaxed=self.relaxed, accumulate=self.accumulate, trace=self._trace)

    def absorb(self, other: "TileEngine") -> None:
        self.counters.merge(other.counters)
        if self._trace and other.load_trace:
            self.load_trace.extend(other.load_trace)

    # -- core WMMA surface ---------------------------------------------------

    def load_tile(
        self,
        buffer: np.ndarray,
        offset: int = 0,
        layout: Layout = Layout.ROW_MAJOR,
        stride: int | None = None,
        kind: FragmentKind = FragmentKind.MATRIX_A,
        shape: TileShape = SHAPE_16,
    ) -> Fragment:
        """Gather a tile from ``buffer`` into a fresh fragment.

        ``stride`` is the leading dimension: elements per row for
        row-major, per column for column-major.  Defaults to the tile's
        own row/column length.
        """
        rows, cols = shape.dims(kind)
        if stride is None:
            stride = cols if layout is Layout.ROW_MAJOR else rows
        idx = offset + _index_grid(rows, cols, layout, stride)
        hi = int(idx[-1, -1])
        if offset < 0 or hi >= buffer.shape[0]:
            raise OutOfBoundsError(max(hi, offset), buffer.shape[0])
        dtype = self.acc_dtype if kind is FragmentKind.ACCUMULATOR else HALF
        with np.errstate(over="ignore"):
            data = buffer[idx].astype(dtype)
        self.counters.tile_loads += 1
        self.counters.elements_loaded += rows * cols
        if self._trace:
            self.load_trace.append(_LoadRecord(offset, layout, stride, kind))
        return Fragment(kind, shape, data)

    def store_tile(
        self,
        frag: Fragment,
        buffer: np.ndarray,
        offset: int = 0,
        layout: Layout = Layout.ROW_MAJOR,
        stride: int | None = None,
    ) -> None:
        """Scatter an accumulator fragment back to a linear buffer."""
        if frag.kind is not FragmentKind.ACCUMULATOR:
            raise WrongKindError("only accumulator fragments can be stored")
        rows, cols = frag._data.shape
        if stride is None:
            stride = cols if layout is Layout.ROW_MAJOR else rows
        idx = offset + _index_grid(rows, cols, layout, stride)
        hi = int(idx[-1, -1])
        if offset < 0 or hi >= buffer.shape[0]:
            raise OutOfBoundsError(max(hi, offset), buffer.shape[0])
        with np.errstate(over="ignore"):
            buffer[idx] = frag._data.astype(buffer.dtype)
        self.counters.tile_stores += 1
        self.counters.elements_stored += rows * cols

    def fill(
        self,
        shape: TileShape = SHAPE_16,
        kind: FragmentKind = FragmentKind.ACCUMULATOR,
        value: float = 0.0,
    ) -> Fragment:
        """Broadcast one scalar into every element (legal in both API modes)."""
        rows, cols = shape.dims(kind)
        dtype = self.acc_dtype if kind is FragmentKind.ACCUMULATOR else HALF
        data = np.full((rows, cols), value, dtype=dtype)
        self.counters.fill_count += 1
        return Fragment(kind, shape, data)

    def mma(self, a: Fragment, b: Fragment, c: Fragment) -> Fragment:
        """d = a @ b + c with one rounding per output element.

        Products of binary16 operands are exact in binary64; the dot
        product plus ``c`` is accumulated in binary64 and rounded once to
        the accumulator precision.  Binary64 accumulation is exact for
        every integer workload below 2^53, which covers all conformance
        suites here; for general inputs it is a <= 2^-40 relative
        approximation of the ideal infinitely-precise accumulator.
        """
        if a.kind is not FragmentKind.MATRIX_A or b.kind is not FragmentKind.MATRIX_B:
            raise WrongKindError("mma needs (matrix_a, matrix_b, accumulator) operands")
        if c.kind is not FragmentKind.ACCUMULATOR:
            raise WrongKindError("mma accumulator operand must be an accumulator fragment")
        if a.shape != b.shape or a.shape != c.shape:
            raise ShapeMismatchError(
                f"mma operands disagree on tile shape: {a.shape}, {b.shape}, {c.shape}"
            )
        wide = a._data.astype(np.float64) @ b._data.astype(np.float64)
        wide += c._data.astype(np.float64)
        self.counters.mma_count += 1
        with np.errstate(over="ignore"):
            return Fragment(c.kind, c.shape, wide.astype(c.dtype))

    # -- constant tiles ------------------------------------------------------

    def _constant(self, kind: FragmentKind, shape: TileShape, matrix: np.ndarray) -> Fragment:
        """Materialize a non-uniform constant tile.

        Relaxed mode writes the pattern straight into the fragment (one
        fill).  Strict mode models the unextended API: the pattern lives
        in an ordinary memory buffer (prepared once, before launch) and
        every use pays a tile load.
        """
        if self.relaxed:
            self.counters.fill_count += 1
        else:
            rows, cols = matrix.shape
            self.counters.tile_loads += 1
            self.counters.elements_loaded += rows * cols
        return Fragment(kind, shape, matrix)

    def first_row_ones(self, shape: TileShape = SHAPE_16) -> Fragment:
        """matrix_a tile with row 0 all ones: left-multiplying sums each
        column of the right operand into row 0."""
        rows, cols = shape.dims(FragmentKind.MATRIX_A)
        m = np.zeros((rows, cols), dtype=HALF)
        m[0, :] = 1
        return self._constant(FragmentKind.MATRIX_A, shape, m)

    def first_col_ones(self, shape: TileShape = SHAPE_16) -> Fragment:
        """matrix_b tile with column 0 all ones: right-multiplying sums each
        row of the left operand into column 0."""
        rows, cols = shape.dims(FragmentKind.MATRIX_B)
        m = np.zeros((rows, cols), dtype=HALF)
        m[:, 0] = 1
        return self._constant(FragmentKind.MATRIX_B, shape, m)

    def upper_ones(self, shape: TileShape = SHAPE_16) -> Fragment:
        """matrix_b tile with ones on and above the diagonal: right-multiplying
        produces inclusive prefix sums along each row."""
        rows, cols = shape.dims(FragmentKind.MATRIX_B)
        m = np.triu(np.ones((rows, cols), dtype=HALF), k=0)
        return self._constant(FragmentKind.MATRIX_B, shape, m)

    def strict_upper_ones(self, shape: TileShape = SHAPE_16) -> Fragment:
        """matrix_b tile with ones strictly above the diagonal: exclusive
        prefix sums along each row."""
        rows, cols = shape.dims(FragmentKind.MATRIX_B)
        m = np.triu(np.ones((rows, cols), dtype=HALF), k=1)
        return self._constant(FragmentKind.MATRIX_B, shape, m)

    def strict_lower_ones(self, shape: TileShape = SHAPE_16) -> Fragment:
        """matrix_a tile with ones strictly below the diagonal (zero
        diagonal): left-multiplying produces exclusive prefix sums down
        each column."""
        rows, cols = shape.dims(FragmentKind.MATRIX_A)
        m = np.tril(np.ones((rows, cols), dtype=HALF), k=-1)
        return self._constant(FragmentKind.MATRIX_A, shape, m)

    def all_ones(self, shape: TileShape = SHAPE_16, kind: FragmentKind = FragmentKind.MATRIX_B) -> Fragment:
        return self.fill(shape, kind, 1.0)

    def zero_acc(self, shape: TileShape = SHAPE_16) -> Fragment:
        return self.fill(shape, FragmentKind.ACCUMULATOR, 0.0)

    # -- layout-aware extensions (always relaxed-path ops) --------------------

    def set_upper_triangular(self, frag: Fragment) -> None:
        """Rewrite a 16x16 matrix_b fragment in place to the inclusive
        upper-triangular ones pattern, with no memory round trip."""
        if frag.kind is not FragmentKind.MATRIX_B or frag._data.shape != (16, 16):
            raise WrongKindError("set_upper_triangular needs a 16x16 matrix_b fragment")
        frag._data[...] = np.triu(np.ones((16, 16), dtype=HALF), k=0)
        self.counters.fill_count += 1

    def get_first_column(self, frag: Fragment) -> np.ndarray:
        """Column 0 of a 16x16 matrix_a / matrix_b fragment, written out once
        per element without storing the whole tile."""
        if frag.kind is FragmentKind.ACCUMULATOR or frag._data.shape != (16, 16):
            raise WrongKindError("get_first_column needs a 16x16 matrix_a/matrix_b fragment")
        self.counters.elements_stored += frag.rows
        return frag._data[:, 0].copy()

    def cast_kind(self, frag: Fragment, kind: FragmentKind) -> Fragment:
        """Re-type a fragment by a scratch-memory round trip.

        Fragment kinds have distinct register layouts, so the cast is
        expressed as store-then-load: one tile store plus one tile load,
        in both API modes.  Accumulator data narrows to binary16 when the
        target kind is matrix_a / matrix_b.
        """
        rows, cols = frag._data.shape
        target_dims = frag.shape.dims(kind)
        if target_dims != (rows, cols):
            raise ShapeMismatchError(
                f"cannot cast {rows}x{cols} {frag.kind.value} to {kind.value} "
                f"({target_dims[0]}x{target_dims[1]}) within shape {frag.shape}"
            )
        dtype = self.acc_dtype if kind is FragmentKind.ACCUMULATOR else HALF
        self.counters.tile_stores += 1
        self.counters.elements_stored += rows * cols
        self.counters.tile_loads += 1
        self.counters.elements_loaded += rows * cols
        return Fragment(kind, frag.shape, frag._data.astype(HALF).astype(dtype))

    # -- partial reads / writes ----------------------------------------------
    #
    # The relaxed API reads registers directly; the strict API must first
    # store the whole fragment to scratch and re-read the wanted elements.

    def _strict_spill(self, frag: Fragment, n_read: int) -> None:
        self.counters.tile_stores += 1
        self.counters.elements_stored += frag.rows * frag.cols
        self.counters.elements_loaded += n_read

    def read_element(self, frag: Fragment, r: int, c: int) -> np.number:
        if not self.relaxed:
            self._strict_spill(frag, 1)
        return frag._data[r, c]

    def store_element(self, frag: Fragment, r: int, c: int, buffer: np.ndarray, offset: int) -> None:
        value = self.read_element(frag, r, c)
        buffer[offset] = value
        self.counters.elements_stored += 1

    def store_first_row(self, frag: Fragment, buffer: np.ndarray, offset: int) -> None:
        """Write row 0 of a fragment to consecutive buffer locations."""
        if not self.relaxed:
            self._strict_spill(frag, frag.cols)
        buffer[offset:offset + frag.cols] = frag._data[0, :]
        self.counters.elements_stored += frag.cols

    def broadcast_element(self, frag: Fragment, r: int, c: int) -> Fragment:
        """Accumulator tile with every element equal to ``frag[r, c]``."""
        value = self.read_element(frag, r, c)
        shape = frag.shape
        rows, cols = shape.dims(FragmentKind.ACCUMULATOR)
        self.counters.fill_count += 1
        return Fragment(
            FragmentKind.ACCUMULATOR, shape,
            np.full((rows, cols), value, dtype=self.acc_dtype),
        )

    def read_last_column(self, frag: Fragment) -> np.ndarray:
        """Values of the last column (strict mode spills the tile first)."""
        if not self.relaxed:
            self._strict_spill(frag, frag.rows)
        return frag._data[:, -1].copy()

    def scalar_at_origin(self, value: float, shape: TileShape = SHAPE_16) -> Fragment:
        """Accumulator tile that is zero except for ``value`` at (0, 0).

        Not a uniform fill, so the strict path models a scratch write plus
        a tile load from the prepared buffer.
        """
        rows, cols = shape.dims(FragmentKind.ACCUMULATOR)
        if self.relaxed:
            self.counters.fill_count += 1
        else:
            self.counters.elements_stored += 1
            self.counters.tile_loads += 1
            self.counters.elements_loaded += rows * cols
        data = np.zeros((rows, cols), dtype=self.acc_dtype)
        data[0, 0] = value
        return Fragment(FragmentKind.ACCUMULATOR, shape, data)

    def broadcast_last_column(self, frag: Fragment) -> Fragment:
        """Accumulator tile whose row r is everywhere ``frag[r, last]``.

        Row-varying, so the strict path cannot use a scalar fill: it spills
        the source tile, rewrites the pattern to scratch, and loads it back.
        """
        col = frag._data[:, -1]
        rows, cols = frag.shape.dims(FragmentKind.ACCUMULATOR)
        if self.relaxed:
            self.counters.fill_count += 1
        else:
            self._strict_spill(frag, frag.rows)
            self.counters.elements_stored += rows * cols
            self.counters.tile_loads += 1
            self.counters.elements_loaded += rows * cols
        data = np.repeat(col.astype(self.acc_dtype)[:, None], cols, axis=1)
        return Fragment(FragmentKind.ACCUMULATOR, frag.shape, data)


def naive_tiled_matmul(
    a: np.ndarray,
    b: np.ndarray,
    engine: TileEngine | None = None,
    accumulate: str | None = None,
) -> np.ndarray:
    """Dense matmul built purely from 16x16x16 tile loads, MMAs and stores.

    Engine validation plumbing: each warp-equivalent walks a 16-row strip
    of ``a`` against a 16-column strip of ``b``, accumulating one output
    tile.  Inputs with dimensions that are not multiples of 16 are
    zero-padded; the result is cropped back.
    """
    if engine is None:
        engine = TileEngine(accumulate=accumulate or "half")
    elif accumulate is not None and accumulate != engine.accumulate:
        raise ValueError("accumulate argument conflicts with the engine's mode")
    a = np.asarray(a, dtype=HALF)
    b = np.asarray(b, dtype=HALF)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeMismatchError(f"cannot multiply {a.shape} by {b.shape}")
    m, k = a.shape
    _, n = b.shape
    mp, kp, np_ = (-(-d // 16) * 16 for d in (m, k, n))
    a_pad = np.zeros((mp, kp), dtype=HALF)
    a_pad[:m, :k] = a
    b_pad = np.zeros((kp, np_), dtype=HALF)
    b_pad[:k, :n] = b
    a_flat, b_flat = a_pad.ravel(), b_pad.ravel()
    out = np.zeros(mp * np_, dtype=engine.acc_dtype)
    for i in range(0, mp, 16):
        for j in range(0, np_, 16):
            acc = engine.zero_acc(SHAPE_16)
            for l in range(0, kp, 16):
                at = engine.load_tile(a_flat, offset=i * kp + l, stride=kp,
                                      kind=FragmentKind.MATRIX_A)
                bt = engine.load_tile(b_flat, offset=l * np_ + j, stride=np_,
                                      kind=FragmentKind.MATRIX_B)
                acc = engine.mma(at, bt, acc)
            engine.store_tile(acc, out, offset=i * np_ + j, stride=np_)
    return out.reshape(mp, np_)[:m, :n]
