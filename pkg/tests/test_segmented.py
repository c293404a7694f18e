"""Padding policy invariants."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halftile import pad_segmented
from halftile.errors import BadLengthError


class TestPadSegmented:
    def test_exact_fit_unchanged(self):
        sv = pad_segmented(np.arange(64, dtype=np.float16), 16)
        assert sv.seg_size == 16 and sv.n_segments == 4
        assert sv.padded_elements == 0
        assert np.array_equal(sv.data, np.arange(64, dtype=np.float16))

    def test_segment_rounded_to_multiple(self):
        sv = pad_segmented(np.ones(20, np.float16), 10)
        assert sv.seg_size == 16
        assert sv.data.size == 32
        assert sv.data.reshape(2, 16)[:, 10:].sum() == 0  # tail zeros

    def test_partial_last_segment(self):
        sv = pad_segmented(np.ones(40, np.float16), 16)
        assert sv.n_segments == 3
        assert sv.data[40:].sum() == 0
        assert sv.unpad_sums(np.array([16, 16, 8.0])).tolist() == [16, 16, 8]

    def test_count_multiple_adds_zero_segments(self):
        sv = pad_segmented(np.ones(32, np.float16), 16, count_multiple=16)
        assert sv.n_segments == 16
        assert sv.n_logical_segments == 2
        assert sv.data[32:].sum() == 0

    def test_unpad_scan_drops_padding(self):
        sv = pad_segmented(np.ones(20, np.float16), 10)
        scanned = np.cumsum(sv.data.reshape(2, 16), axis=1).reshape(-1)
        out = sv.unpad_scan(scanned)
        assert out.tolist() == list(range(1, 11)) * 2

    def test_rejects_bad_inputs(self):
        with pytest.raises(BadLengthError):
            pad_segmented(np.ones(0, np.float16), 16)
        with pytest.raises(BadLengthError):
            pad_segmented(np.ones(16, np.float16), 0)
        with pytest.raises(BadLengthError):
            pad_segmented(np.ones((4, 4), np.float16), 4)

    @given(st.integers(1, 500), st.integers(1, 64), st.integers(1, 3))
    @settings(max_examples=200, deadline=None)
    def test_invariants_hold(self, length, seg, count_pow):
        values = np.arange(1, length + 1, dtype=np.float16)
        sv = pad_segmented(values, seg, count_multiple=4 ** (count_pow - 1))
        assert sv.data.size % sv.seg_size == 0
        assert sv.seg_size % 16 == 0
        assert sv.logical_len == length
        # Padded positions are all zero, logical prefix is intact.
        grid = sv.data.reshape(sv.n_segments, sv.seg_size)
        rebuilt = grid[: sv.n_logical_segments, : sv.logical_seg_size].reshape(-1)[:length]
        assert np.array_equal(rebuilt, values)
        assert sv.data.astype(np.float64).sum() == values.astype(np.float64).sum()
