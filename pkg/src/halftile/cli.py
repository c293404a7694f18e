"""Command-line harness: segmented reduce/scan over files with checking.

Usage::

    halftile reduce --input data.f16 --output sums.f16 --segment-size 64 \
        [--algo auto] [--wpb 4] [--check] [--cost-csv costs.csv] \
        [--format f16|text] [--strict-wmma] [--workers 1]
    halftile scan ...

Input/output formats: raw little-endian binary16 words (``.f16``) or
UTF-8 text with one literal per line; inferred from the file extension
unless ``--format`` forces one.  ``TCU_THRESHOLD_BLOCK`` overrides the
block-level selection threshold.

Exit codes: 0 success, 1 oracle check failed, 2 unusable input.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .engine import CostCounters, TileEngine
from .errors import BadConfigError, BadLengthError, HalftileError, ParseError
from .half import format_half_text, halves_from_bytes, halves_to_bytes, parse_half_text
from .oracle import oracle_segmented_reduce, oracle_segmented_scan
from .plan import select_algorithm
from .reduce import REDUCE_VARIANTS, BlockConfig, segmented_reduce
from .scan import SCAN_VARIANTS, segmented_scan
from .segmented import pad_segmented

#: Per-segment tolerance when checking non-integer data against the wide
#: oracle: one part in 2^8, the binary16 unit roundoff times the slack of
#: re-associating a few thousand addends.
CHECK_RTOL = 2.0 ** -8
CHECK_ATOL = 2.0 ** -24

CSV_HEADER = "op,seg_size,n,variant,mma,tile_loads,tile_stores,cycles,baseline_cycles,check"


@dataclass
class RunReport:
    """Everything one invocation learned, for the console and the CSV."""

    op: str
    seg_size: int
    n_elements: int
    variant: str
    counters: CostCounters
    baseline_cycles: int
    check: str  # pass | fail | skipped
    wall_time_s: float
    padded_elements: int

    @property
    def cycle_estimate(self) -> int:
        return self.counters.cycle_estimate

    def csv_row(self) -> list:
        return [
            self.op, self.seg_size, self.n_elements, self.variant,
            self.counters.mma_count, self.counters.tile_loads,
            self.counters.tile_stores, self.cycle_estimate,
            self.baseline_cycles, self.check,
        ]


def emit_cost_csv(reports, stream) -> None:
    """Header plus one row per report, in submission order."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for rep in reports:
        writer.writerow(rep.csv_row())


def _resolve_format(path: str, forced: str | None) -> str:
    if forced:
        return forced
    return "f16" if Path(path).suffix == ".f16" else "text"


def read_values(path: str, forced_format: str | None = None) -> np.ndarray:
    fmt = _resolve_format(path, forced_format)
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if fmt == "f16":
        return halves_from_bytes(raw)
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path} is not UTF-8 text; use --format f16?") from exc
    return parse_half_text(text)


def write_values(path: str, values: np.ndarray, forced_format: str | None = None) -> None:
    fmt = _resolve_format(path, forced_format)
    data = (
        halves_to_bytes(values)
        if fmt == "f16"
        else format_half_text(values).encode("utf-8")
    )
    Path(path).write_bytes(data)


def _check_against_oracle(op, values, seg_size, result) -> str:
    sv = pad_segmented(values, seg_size)
    if op == "reduce":
        expected = oracle_segmented_reduce(sv.data, sv.seg_size)[: sv.n_logical_segments]
    else:
        expected = oracle_segmented_scan(sv.data, sv.seg_size)
        expected = sv.unpad_scan(expected)
    got = np.asarray(result, dtype=np.float64)
    if got.shape != expected.shape:
        return "fail"
    ok = np.all(np.abs(got - expected) <= CHECK_ATOL + CHECK_RTOL * np.abs(expected))
    return "pass" if ok else "fail"


def run(
    op: str,
    values: np.ndarray,
    seg_size: int,
    algo: str = "auto",
    wpb: int = 4,
    workers: int = 1,
    strict_wmma: bool = False,
    check: bool = False,
) -> tuple[np.ndarray, RunReport]:
    """Execute one collective and assemble its report.

    The baseline cycle column scales the shuffle model's constant of 256
    cycles per 256 elements across the padded input.
    """
    if seg_size < 1:
        raise BadConfigError(f"segment size must be positive, got {seg_size}")
    variants = REDUCE_VARIANTS if op == "reduce" else SCAN_VARIANTS
    if algo == "auto":
        variant = select_algorithm(op, seg_size, total_len=values.size, wpb=wpb).variant
    elif algo in variants:
        variant = algo
    else:
        raise BadConfigError(f"unknown --algo {algo!r} for {op}; pick from {variants}")
    engine = TileEngine(relaxed=not strict_wmma)
    cfg = BlockConfig(wpb=wpb)
    fn = segmented_reduce if op == "reduce" else segmented_scan
    start = time.perf_counter()
    if variant == "grid":
        out = fn(values, max(seg_size, values.size), variant, engine, cfg=cfg, workers=workers)
    else:
        out = fn(values, seg_size, variant, engine, cfg=cfg, workers=workers)
    wall = time.perf_counter() - start
    sv = pad_segmented(values, seg_size)
    status = "skipped"
    if check:
        if variant == "grid":
            status = _check_against_oracle(op, values, values.size, out)
        else:
            status = _check_against_oracle(op, values, seg_size, out)
    report = RunReport(
        op=op,
        seg_size=seg_size,
        n_elements=int(values.size),
        variant=variant,
        counters=engine.counters.snapshot(),
        baseline_cycles=int(sv.data.size),
        check=status,
        wall_time_s=wall,
        padded_elements=int(sv.padded_elements),
    )
    return out, report


def _append_csv(path: str, report: RunReport) -> None:
    p = Path(path)
    fresh = not p.exists() or p.stat().st_size == 0
    with p.open("a", newline="") as fh:
        if fresh:
            fh.write(CSV_HEADER + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(report.csv_row())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="halftile",
        description="Segmented reduce/scan on a simulated MMA tile engine",
    )
    sub = parser.add_subparsers(dest="op", required=True)
    for op, variants in (("reduce", REDUCE_VARIANTS), ("scan", SCAN_VARIANTS)):
        p = sub.add_parser(op, help=f"segmented {op}")
        p.add_argument("--input", required=True, help="input file (.f16 binary or text)")
        p.add_argument("--output", required=True, help="output file")
        p.add_argument("--segment-size", type=int, required=True)
        p.add_argument("--algo", default="auto", choices=("auto",) + variants)
        p.add_argument("--wpb", type=int, default=4, help="warps per block (block level)")
        p.add_argument("--workers", type=int, default=1, help="worker threads")
        p.add_argument("--check", action="store_true", help="verify against the scalar oracle")
        p.add_argument("--cost-csv", help="append the cost row to this CSV")
        p.add_argument("--format", choices=("f16", "text"), help="force the file format")
        p.add_argument("--strict-wmma", action="store_true",
                       help="model the unextended fragment API (more memory traffic)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        values = read_values(args.input, args.format)
        if values.size == 0:
            raise ParseError(f"{args.input} holds no values")
        out, report = run(
            args.op, values, args.segment_size,
            algo=args.algo, wpb=args.wpb, workers=args.workers,
            strict_wmma=args.strict_wmma, check=args.check,
        )
        write_values(args.output, np.asarray(out, dtype=np.float16), args.format)
        if args.cost_csv:
            _append_csv(args.cost_csv, report)
    except (ParseError, BadLengthError, BadConfigError, HalftileError) as exc:
        print(f"halftile {args.op}: error: {exc}", file=sys.stderr)
        return 2
    c = report.counters
    print(
        f"{report.op} seg={report.seg_size} n={report.n_elements} "
        f"variant={report.variant} mma={c.mma_count} loads={c.tile_loads} "
        f"stores={c.tile_stores} cycles={report.cycle_estimate} "
        f"baseline={report.baseline_cycles} padded=+{report.padded_elements} "
        f"check={report.check} wall={report.wall_time_s:.3f}s"
    )
    return 1 if report.check == "fail" else 0


if __name__ == "__main__":
    sys.exit(main())
