"""Scalar oracles and the shuffle baseline."""

import numpy as np
import pytest

from halftile import (
    oracle_segmented_reduce,
    oracle_segmented_scan,
    shuffle_reduce_256_cost,
    shuffle_warp_reduce,
    shuffle_warp_scan,
)
from halftile.errors import BadLengthError
from halftile.oracle import EXACT, FAITHFUL_HALF

from conftest import exact_int_segments


class TestSegmentedReduceOracle:
    def test_ones(self):
        assert oracle_segmented_reduce(np.ones(64), 16).tolist() == [16.0] * 4

    def test_arithmetic_series_closed_form(self):
        out = oracle_segmented_reduce(np.arange(1, 17), 16)
        assert out.tolist() == [16 * 17 / 2]

    def test_zeros(self):
        assert oracle_segmented_reduce(np.zeros(32), 16).tolist() == [0.0, 0.0]

    def test_length_must_divide(self):
        with pytest.raises(BadLengthError):
            oracle_segmented_reduce(np.ones(17), 16)

    def test_faithful_half_rounds_each_step(self):
        # 2048 + 1 + 1 + 1 sticks at 2048 when every add rounds to binary16.
        vals = np.array([2048, 1, 1, 1], dtype=np.float16)
        assert oracle_segmented_reduce(vals, 4, FAITHFUL_HALF)[0] == 2048.0
        assert oracle_segmented_reduce(vals, 4, EXACT)[0] == 2051.0

    def test_modes_agree_on_exact_integers(self, rng):
        x = exact_int_segments(rng, 4096, 64)
        exact = oracle_segmented_reduce(x, 64, EXACT)
        faithful = oracle_segmented_reduce(x, 64, FAITHFUL_HALF)
        assert np.array_equal(exact, faithful.astype(np.float64))


class TestSegmentedScanOracle:
    def test_inclusive_ones(self):
        out = oracle_segmented_scan(np.ones(8), 4)
        assert out.tolist() == [1, 2, 3, 4, 1, 2, 3, 4]

    def test_exclusive_ones(self):
        out = oracle_segmented_scan(np.ones(8), 4, inclusive=False)
        assert out.tolist() == [0, 1, 2, 3, 0, 1, 2, 3]

    def test_closed_form(self):
        out = oracle_segmented_scan(np.array([1, 2, 3, 4]), 4)
        assert out.tolist() == [1, 3, 6, 10]

    def test_scan_tail_equals_reduce(self, rng):
        x = exact_int_segments(rng, 1024, 128)
        scans = oracle_segmented_scan(x, 128).reshape(-1, 128)
        sums = oracle_segmented_reduce(x, 128)
        assert np.array_equal(scans[:, -1], sums)


class TestShuffleBaseline:
    def test_reduce_ones(self):
        total, cost = shuffle_warp_reduce(np.ones(32, np.float16))
        assert total == 32.0
        assert cost.shuffle_ops == 5

    def test_reduce_zeros(self):
        total, _ = shuffle_warp_reduce(np.zeros(32, np.float16))
        assert total == 0.0

    def test_reduce_sequence(self):
        total, _ = shuffle_warp_reduce(np.arange(1, 33, dtype=np.float16))
        assert total == 528.0

    def test_scan_ones(self):
        out, cost = shuffle_warp_scan(np.ones(32, np.float16))
        assert out.tolist() == list(range(1, 33))
        assert cost.shuffle_ops == 5

    def test_scan_zeros(self):
        out, _ = shuffle_warp_scan(np.zeros(32, np.float16))
        assert np.all(out == 0)

    def test_scan_last_lane_equals_reduce(self, rng):
        vals = rng.integers(0, 8, 32).astype(np.float16)
        out, _ = shuffle_warp_scan(vals)
        total, _ = shuffle_warp_reduce(vals)
        assert out[-1] == total

    def test_lane_count_enforced(self):
        with pytest.raises(BadLengthError):
            shuffle_warp_reduce(np.ones(31, np.float16))
        with pytest.raises(BadLengthError):
            shuffle_warp_scan(np.ones(33, np.float16))

    def test_step_cycles_model(self):
        _, cost = shuffle_warp_reduce(np.ones(32, np.float16))
        assert cost.step_cycles == 20  # 5 steps at 4 cycles, reported separately

    def test_256_element_baseline_constant(self):
        assert shuffle_reduce_256_cost() == 256
