"""Command-line front end.

Subcommands: analyze, tune, allocate, simulate, occupancy, area, pipeline.
Exit codes: 0 success, 1 input error, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys

from .allocator import AllocationError, allocate, dump_table, register_pressure
from .area import area_estimate
from .interp import InterpError
from .liveness import compute_live_ranges
from .minifloat import F32_FORMAT
from .occupancy import occupancy
from .parser import ParseError, parse
from .pipeline import PipelineError, PipelineOptions, run_pipeline
from .rangeanalysis import analyze_kernel
from .sim import SimConfig, SimError, build_trace, simulate
from .tuner import (METRIC_BINARY, METRIC_DEVIATION, SampleError, expand_sample,
                    parse_samples, tune)

INPUT_ERRORS = (ParseError, SampleError, InterpError, SimError, AllocationError,
                PipelineError, ValueError, OSError)


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _metric_and_threshold(args) -> tuple[str, float]:
    if args.threshold == "exact":
        return METRIC_BINARY, 0.0
    metric = {"deviation": METRIC_DEVIATION, "binary": METRIC_BINARY}[args.metric]
    return metric, float(args.threshold)


def _add_quality_flags(p):
    p.add_argument("--metric", choices=["deviation", "binary"],
                   default="deviation", help="output quality metric")
    p.add_argument("--threshold", default="0",
                   help="deviation percentage, or 'exact' for bit-identical output")


def cmd_analyze(args) -> int:
    kernel = parse(_read(args.kernel))
    analysis = analyze_kernel(kernel)
    live = compute_live_ranges(kernel)
    print(f"kernel {kernel.name}: baseline register pressure {live.max_live}")
    if analysis.per_variable:
        print("variable ranges:")
        for name, w in sorted(analysis.per_variable.items()):
            print(f"  {name}: [{w.lo}, {w.hi}] signed={w.signed} -> {w.bits} bits")
    if analysis.per_value:
        print("value widths:")
        for v, w in sorted(analysis.per_value.items()):
            print(f"  {v}: [{w.lo}, {w.hi}] -> {w.bits} bits")
    if args.report:
        import json
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(analysis.export_widths(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def cmd_tune(args) -> int:
    kernel = parse(_read(args.kernel))
    samples = parse_samples(_read(args.samples))
    metric, threshold = _metric_and_threshold(args)
    report = tune(kernel, samples, metric, threshold)
    if not report.assignment:
        print(f"kernel {kernel.name}: no float values to tune")
        return 0
    print(f"kernel {kernel.name}: tuned {len(report.assignment)} float values "
          f"in {report.sweeps} sweeps ({report.probes} probes)")
    for v, fmt in sorted(report.assignment.items()):
        print(f"  {v}: {fmt.total_bits} bits")
    for name, score in sorted(report.worst_scores.items()):
        print(f"  sample {name}: deviation {score:.6f}%")
    return 0


def _allocate_from_args(args):
    kernel = parse(_read(args.kernel))
    analysis = analyze_kernel(kernel)
    live = compute_live_ranges(kernel)
    types = kernel.value_types()
    widths, signedness = {}, {}
    for v, ty in types.items():
        if ty.kind != "int":
            continue
        ann = analysis.per_value.get(v)
        widths[v] = ann.bits if ann else 32
        signedness[v] = ann.signed if ann else ty.signed
    float_vals = [v for v, t in types.items() if t.kind == "float"]
    formats = {}
    if float_vals:
        if args.samples:
            metric, threshold = _metric_and_threshold(args)
            formats = tune(kernel, parse_samples(_read(args.samples)),
                           metric, threshold).assignment
        else:
            formats = {v: F32_FORMAT for v in float_vals}
    alloc = allocate(kernel, widths, live, formats or None, signedness)
    return kernel, live, formats, alloc


def cmd_allocate(args) -> int:
    kernel, live, formats, alloc = _allocate_from_args(args)
    print(f"kernel {kernel.name}: register pressure {alloc.baseline_pressure} "
          f"-> {register_pressure(alloc, live)} "
          f"({alloc.split_count} split operands)")
    sys.stdout.write(dump_table(alloc))
    return 0


def cmd_simulate(args) -> int:
    kernel, live, formats, alloc = _allocate_from_args(args)
    inputs = {}
    if kernel.params:
        if not args.samples:
            raise SimError("kernel has parameters; provide --samples for inputs")
        inputs = expand_sample(kernel, parse_samples(_read(args.samples))[0])[0]
    trace = build_trace(kernel, alloc, args.warps, inputs,
                        max_steps=args.trace_steps,
                        assignment=formats or None)
    cfg = SimConfig()
    result = simulate(trace, alloc, args.warps, cfg, args.mode,
                      args.writeback_delay if args.mode == "packed" else None)
    print(f"mode={result.mode} warps={result.occupancy_warps} "
          f"retired={result.retired} cycles={result.cycles} ipc={result.ipc:.4f}")
    for k, v in sorted(result.stalls.items()):
        print(f"  stall {k}: {v}")
    return 0


def cmd_occupancy(args) -> int:
    r = occupancy(args.regs, args.warps_per_block, args.shmem)
    print(f"blocks={r.blocks} warps={r.active_warps} "
          f"occupancy={r.occupancy_percent:.2f}% (~{r.rounded_percent}%) "
          f"limiter={r.limiter}")
    return 0


def cmd_area(args) -> int:
    m = area_estimate(args.arch)
    print(f"architecture {m.architecture}: {m.sm_count} SMs, "
          f"{m.blocks_per_sm} processing block(s)/SM")
    for name, count in m.parts.items():
        print(f"  {name}: {count:,}")
    print(f"  per-block total: {m.per_block_total:,}")
    print(f"  per-SM total: {m.per_sm_total:,}")
    print(f"  chip total: {m.chip_total:,} (reported ~{m.chip_reported:,})")
    return 0


def cmd_pipeline(args) -> int:
    metric, threshold = _metric_and_threshold(args)
    options = PipelineOptions(
        metric=metric, threshold=threshold,
        warps_per_block=args.warps_per_block,
        shared_mem_per_block=args.shmem,
        sim_warps=args.sim_warps,
        writeback_delay=args.writeback_delay,
        arch=args.arch,
        trace_steps=args.trace_steps,
        run_simulation=not args.no_sim,
    )
    samples = _read(args.samples) if args.samples else None
    report = run_pipeline(_read(args.kernel), samples, options)
    sys.stdout.write(report.to_text())
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="regslice",
        description="static register compression toolkit: range analysis, "
                    "float precision tuning, slice allocation, and a packed "
                    "register-file simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="integer range analysis and bit widths")
    p.add_argument("kernel")
    p.add_argument("--report", help="write the width map as JSON")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("tune", help="tune float storage formats")
    p.add_argument("kernel")
    p.add_argument("--samples", required=True)
    _add_quality_flags(p)
    p.set_defaults(fn=cmd_tune)

    p = sub.add_parser("allocate", help="pack operands into register slices")
    p.add_argument("kernel")
    p.add_argument("--samples")
    _add_quality_flags(p)
    p.set_defaults(fn=cmd_allocate)

    p = sub.add_parser("simulate", help="run the register-file simulator")
    p.add_argument("kernel")
    p.add_argument("--samples")
    _add_quality_flags(p)
    p.add_argument("--mode", choices=["baseline", "packed"], default="packed")
    p.add_argument("--warps", type=int, default=4)
    p.add_argument("--writeback-delay", type=int, default=None)
    p.add_argument("--trace-steps", type=int, default=200_000)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("occupancy", help="occupancy calculator")
    p.add_argument("--regs", type=int, required=True)
    p.add_argument("--warps-per-block", type=int, required=True)
    p.add_argument("--shmem", type=int, default=0)
    p.set_defaults(fn=cmd_occupancy)

    p = sub.add_parser("area", help="transistor-count area estimate")
    p.add_argument("--arch", choices=["fermi", "volta"], default="fermi")
    p.set_defaults(fn=cmd_area)

    p = sub.add_parser("pipeline", help="full analyze/tune/allocate/simulate run")
    p.add_argument("kernel")
    p.add_argument("--samples")
    _add_quality_flags(p)
    p.add_argument("--warps-per-block", type=int, default=10)
    p.add_argument("--shmem", type=int, default=0)
    p.add_argument("--sim-warps", type=int, default=4)
    p.add_argument("--writeback-delay", type=int, default=None)
    p.add_argument("--arch", choices=["fermi", "volta"], default="fermi")
    p.add_argument("--trace-steps", type=int, default=200_000)
    p.add_argument("--no-sim", action="store_true")
    p.add_argument("--report", help="write the full report as JSON")
    p.set_defaults(fn=cmd_pipeline)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AssertionError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
