"""halftile: a functional MMA tile-engine simulator with matmul-based
segmented reduction and scan collectives, a cost model, and a verification
harness."""

from .engine import (
    SHAPE_16,
    SHAPE_8x32,
    SHAPE_32x8,
    CostCounters,
    Fragment,
    FragmentKind,
    Layout,
    TileEngine,
    TileShape,
    fragment_text,
    lane_of,
    naive_tiled_matmul,
)
from .errors import (
    BadConfigError,
    BadLengthError,
    HalftileError,
    InvalidStrideError,
    OutOfBoundsError,
    ParseError,
    ShapeMismatchError,
    WrongKindError,
)
from .estimators import SegmentedReduce, SegmentedScan
from .half import HALF, Half
from .oracle import (
    ShuffleCost,
    oracle_segmented_reduce,
    oracle_segmented_scan,
    shuffle_reduce_256_cost,
    shuffle_warp_reduce,
    shuffle_warp_scan,
)
from .plan import ExecPlan, select_algorithm
from .reduce import (
    GRID_REDUCE_PASSES,
    REDUCE_VARIANTS,
    BlockConfig,
    block_reduce_256n,
    coalesced_group_mma_count,
    grid_reduce,
    reduce_16,
    reduce_16n_coalesced,
    reduce_16n_strided,
    reduce_256,
    reduce_256n_efficient,
    reduce_256n_inefficient,
    segmented_reduce,
)
from .scan import (
    GRID_SCAN_PASSES,
    SCAN_VARIANTS,
    block_scan_256n,
    grid_scan,
    last_column_scan_16,
    scan_16,
    scan_16n,
    scan_256,
    scan_256n,
    segmented_scan,
)
from .segmented import SegmentedVector, pad_segmented

__version__ = "0.1.0"

__all__ = [
    "HALF",
    "Half",
    "TileEngine",
    "TileShape",
    "Fragment",
    "FragmentKind",
    "Layout",
    "CostCounters",
    "fragment_text",
    "lane_of",
    "naive_tiled_matmul",
    "SHAPE_16",
    "SHAPE_32x8",
    "SHAPE_8x32",
    "SegmentedVector",
    "pad_segmented",
    "BlockConfig",
    "REDUCE_VARIANTS",
    "SCAN_VARIANTS",
    "GRID_REDUCE_PASSES",
    "GRID_SCAN_PASSES",
    "reduce_16",
    "reduce_256",
    "reduce_256n_efficient",
    "reduce_256n_inefficient",
    "reduce_16n_strided",
    "reduce_16n_coalesced",
    "coalesced_group_mma_count",
    "block_reduce_256n",
    "grid_reduce",
    "segmented_reduce",
    "scan_16",
    "scan_256",
    "scan_16n",
    "scan_256n",
    "last_column_scan_16",
    "block_scan_256n",
    "grid_scan",
    "segmented_scan",
    "oracle_segmented_reduce",
    "oracle_segmented_scan",
    "shuffle_warp_reduce",
    "shuffle_warp_scan",
    "shuffle_reduce_256_cost",
    "ShuffleCost",
    "ExecPlan",
    "select_algorithm",
    "SegmentedReduce",
    "SegmentedScan",
    "HalftileError",
    "OutOfBoundsError",
    "InvalidStrideError",
    "WrongKindError",
    "ShapeMismatchError",
    "BadLengthError",
    "BadConfigError",
    "ParseError",
]
