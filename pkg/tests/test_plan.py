"""Algorithm selection: threshold table, determinism, env override."""

import pytest

from halftile import select_algorithm
from halftile.errors import BadConfigError
from halftile.plan import BLOCK_THRESHOLD_ENV


class TestSelection:
    @pytest.mark.parametrize("seg,variant", [
        (16, "warp16"),
        (32, "strided16n"),
        (255, "strided16n"),
        (256, "warp256"),
        (272, "efficient256n"),
        (4096, "efficient256n"),
        (2 ** 15, "efficient256n"),
        (2 ** 15 + 1, "block256n"),
        (2 ** 20, "block256n"),
    ])
    def test_reduce_table(self, seg, variant):
        assert select_algorithm("reduce", seg).variant == variant

    @pytest.mark.parametrize("seg,variant", [
        (16, "warp16"),
        (240, "strided16n"),
        (256, "warp256"),
        (4096, "warp256n"),
        (2 ** 16, "block256n"),
    ])
    def test_scan_table(self, seg, variant):
        assert select_algorithm("scan", seg).variant == variant

    def test_full_length_goes_to_grid(self):
        assert select_algorithm("reduce", 2 ** 20, total_len=2 ** 20).variant == "grid"
        assert select_algorithm("scan", 4096, total_len=4096).variant == "grid"

    def test_deterministic(self):
        plans = {select_algorithm("reduce", 4096) for _ in range(5)}
        assert len(plans) == 1

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv(BLOCK_THRESHOLD_ENV, "1024")
        assert select_algorithm("reduce", 4096).variant == "block256n"
        monkeypatch.delenv(BLOCK_THRESHOLD_ENV)
        assert select_algorithm("reduce", 4096).variant == "efficient256n"

    def test_explicit_threshold_beats_env(self, monkeypatch):
        monkeypatch.setenv(BLOCK_THRESHOLD_ENV, "1024")
        assert select_algorithm("reduce", 4096, block_thresh=2 ** 15).variant == "efficient256n"

    def test_plan_carries_launch_shape(self):
        plan = select_algorithm("scan", 2 ** 16, wpb=8)
        assert plan.wpb == 8
        assert plan.tile_shape == (16, 16, 16)
        assert plan.coarsening == 1

    def test_bad_inputs(self):
        with pytest.raises(BadConfigError):
            select_algorithm("sort", 16)
        with pytest.raises(BadConfigError):
            select_algorithm("reduce", 0)
