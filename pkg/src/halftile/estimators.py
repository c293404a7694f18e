"""Scikit-learn style transformer facade over the tile collectives.

``SegmentedReduce`` and ``SegmentedScan`` are stateless transformers:
``fit`` validates the configuration against the data and freezes the
execution plan, ``transform`` runs the tile algorithms row by row.  Both
compose with the usual estimator machinery (``get_params`` /
``set_params`` / ``clone`` / pipelines).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .engine import CostCounters, TileEngine
from .errors import BadConfigError
from .plan import select_algorithm
from .reduce import REDUCE_VARIANTS, BlockConfig, segmented_reduce
from .scan import SCAN_VARIANTS, segmented_scan
from .validation import as_half_batch, check_positive


class _SegmentedCollective(BaseEstimator):
    """Shared parameter handling for the reduce/scan transformers."""

    _op = None  # set by subclasses
    _variants = ()

    def __init__(self, segment_size=16, algo="auto", wpb=4, workers=1,
                 strict_wmma=False, accumulate="half"):
        self.segment_size = segment_size
        self.algo = algo
        self.wpb = wpb
        self.workers = workers
        self.strict_wmma = strict_wmma
        self.accumulate = accumulate

    def _resolve_variant(self, row_len: int) -> str:
        if self.algo == "auto":
            return select_algorithm(
                self._op, self.segment_size, total_len=row_len, wpb=self.wpb
            ).variant
        if self.algo not in self._variants:
            raise BadConfigError(
                f"unknown {self._op} algorithm {self.algo!r}; "
                f"pick 'auto' or one of {self._variants}"
            )
        return self.algo

    def fit(self, X, y=None):
        """Validate parameters against the data shape and freeze the plan."""
        X, _ = as_half_batch(X)
        check_positive("segment_size", self.segment_size)
        check_positive("wpb", self.wpb)
        check_positive("workers", self.workers)
        if self.accumulate not in ("half", "single"):
            raise BadConfigError("accumulate must be 'half' or 'single'")
        self.n_features_in_ = X.shape[1]
        self.variant_ = self._resolve_variant(X.shape[1])
        return self

    def _run(self, row: np.ndarray, engine: TileEngine) -> np.ndarray:
        cfg = BlockConfig(wpb=self.wpb)
        fn = segmented_reduce if self._op == "reduce" else segmented_scan
        return fn(row, self.segment_size, self.variant_, engine,
                  cfg=cfg, workers=self.workers)

    def transform(self, X):
        if not hasattr(self, "variant_"):
            raise BadConfigError("transformer is not fitted; call fit first")
        X, was_1d = as_half_batch(X)
        if X.shape[1] != self.n_features_in_:
            raise BadConfigError(
                f"X has {X.shape[1]} features, but fit saw {self.n_features_in_}"
            )
        engine = TileEngine(relaxed=not self.strict_wmma, accumulate=self.accumulate)
        rows = [self._run(row, engine) for row in X]
        self.counters_ = engine.counters.snapshot()
        out = np.stack(rows)
        return out[0] if was_1d else out


class SegmentedReduce(_SegmentedCollective, TransformerMixin):
    """Per-segment sums of each input row, computed on the tile engine.

    ``transform`` maps a row of ``n`` elements to its
    ``ceil(n / segment_size)`` segment totals.
    """

    _op = "reduce"
    _variants = REDUCE_VARIANTS


class SegmentedScan(_SegmentedCollective, TransformerMixin):
    """Per-segment inclusive prefix sums of each input row (shape preserved)."""

    _op = "scan"
    _variants = SCAN_VARIANTS


def last_counters(est) -> CostCounters:
    """Counters from the most recent transform (zeroes if never run)."""
    return getattr(est, "counters_", CostCounters())
