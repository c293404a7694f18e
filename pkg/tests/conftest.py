import numpy as np
import pytest

from halftile import TileEngine


def exact_int_segments(rng, total_len, seg_size, cap=2048, hi=8):
    """Random integers in [0, hi) with every per-segment running total <= cap.

    With non-negative values, every partial sum any algorithm can form is
    bounded by the segment total, so all intermediates stay exact in
    binary16.
    """
    assert total_len % seg_size == 0
    x = rng.integers(0, hi, total_len).astype(np.float64)
    segs = x.reshape(-1, seg_size)
    running = segs.cumsum(axis=1)
    segs[running > cap] = 0
    return segs.reshape(-1).astype(np.float16)


@pytest.fixture
def engine():
    return TileEngine()


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
