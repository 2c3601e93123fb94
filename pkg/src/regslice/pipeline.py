"""End-to-end orchestration: analyze, tune, allocate, simulate, report.

The stages mirror the static framework: integer range analysis and float
precision tuning annotate every value with a width, the slice allocator
produces the indirection table and the packed register pressure, and the
occupancy and simulation stages quantify what the lower pressure buys.
Reports are deterministic: rerunning on identical inputs yields a byte
identical document.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .allocator import allocate, dump_table, register_pressure
from .area import area_estimate
from .ir import Kernel, validate
from .liveness import LiveRanges, compute_live_ranges
from .minifloat import F32_FORMAT
from .occupancy import Machine, OccupancyResult, occupancy
from .parser import parse
from .rangeanalysis import RangeAnalysis, analyze_kernel
from .sim import SimConfig, SimResult, build_trace, simulate
from .tuner import (METRIC_DEVIATION, SampleInput, expand_sample,
                    parse_samples, tune)


class PipelineError(Exception):
    def __init__(self, stage: str, cause: Exception | str):
        super().__init__(f"stage {stage}: {cause}")
        self.stage = stage


@dataclass
class PipelineOptions:
    metric: str = METRIC_DEVIATION
    threshold: float = 0.0
    warps_per_block: int = 10
    shared_mem_per_block: int = 0
    sim_warps: int = 4
    writeback_delay: int | None = None
    arch: str = "fermi"
    trace_steps: int = 200_000
    machine: Machine = field(default_factory=Machine)
    sim_config: SimConfig = field(default_factory=SimConfig)
    run_simulation: bool = True


@dataclass
class PipelineReport:
    kernel: str
    widths: dict
    variables: dict
    formats: dict
    pressure: dict
    table_dump: str
    occupancy_before: OccupancyResult
    occupancy_after: OccupancyResult
    sim_baseline: SimResult | None
    sim_packed: SimResult | None
    area: dict
    tuner: dict
    warnings: list[str]

    def as_dict(self) -> dict:
        def occ(o: OccupancyResult) -> dict:
            return {"blocks": o.blocks, "active_warps": o.active_warps,
                    "percent": round(o.occupancy_percent, 6),
                    "fraction": f"{o.occupancy_fraction.numerator}/"
                                f"{o.occupancy_fraction.denominator}",
                    "limiter": o.limiter}
        return {
            "kernel": self.kernel,
            "widths": self.widths,
            "variables": self.variables,
            "formats": self.formats,
            "pressure": self.pressure,
            "indirection_table": self.table_dump.splitlines(),
            "occupancy": {"before": occ(self.occupancy_before),
                          "after": occ(self.occupancy_after)},
            "simulation": {
                "baseline": self.sim_baseline.as_dict() if self.sim_baseline else None,
                "packed": self.sim_packed.as_dict() if self.sim_packed else None,
            },
            "area": self.area,
            "tuner": self.tuner,
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = [f"kernel {self.kernel}"]
        lines.append(f"  register pressure: {self.pressure['baseline']} -> "
                     f"{self.pressure['packed']}")
        ob, oa = self.occupancy_before, self.occupancy_after
        lines.append(f"  occupancy: {ob.display()} ({ob.active_warps} warps, "
                     f"{ob.limiter}) -> {oa.display()} ({oa.active_warps} warps, "
                     f"{oa.limiter})")
        if self.variables:
            lines.append("  integer variables:")
            for name, w in sorted(self.variables.items()):
                lines.append(f"    {name}: [{w['lo']}, {w['hi']}] -> {w['bits']} bits")
        if self.formats:
            lines.append("  float storage formats:")
            for v, bits in sorted(self.formats.items()):
                lines.append(f"    {v}: {bits} bits")
        if self.sim_baseline and self.sim_packed:
            lines.append(f"  simulated IPC: baseline {self.sim_baseline.ipc:.4f} "
                         f"({self.sim_baseline.cycles} cycles) vs packed "
                         f"{self.sim_packed.ipc:.4f} ({self.sim_packed.cycles} cycles)")
        a = self.area
        lines.append(f"  area ({a['architecture']}): {a['per_sm_total']:,} "
                     f"transistors/SM, {a['chip_total']:,} per chip")
        for w in self.warnings:
            lines.append(f"  warning: {w}")
        return "\n".join(lines) + "\n"


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PipelineError:
        raise
    except Exception as exc:  # noqa: BLE001 - stage name is the contract
        raise PipelineError(name, exc) from exc


def analyze_stage(kernel: Kernel) -> tuple[RangeAnalysis, LiveRanges]:
    problems = validate(kernel)
    if problems:
        raise PipelineError("validate", "; ".join(problems))
    analysis = _stage("range-analysis", analyze_kernel, kernel)
    live = _stage("liveness", compute_live_ranges, kernel)
    return analysis, live


def width_maps(kernel: Kernel, analysis: RangeAnalysis):
    """Integer widths and signedness per live value, full width fallback."""
    types = kernel.value_types()
    widths, signedness = {}, {}
    for v, ty in types.items():
        if ty.kind != "int":
            continue
        ann = analysis.per_value.get(v)
        widths[v] = ann.bits if ann else 32
        signedness[v] = ann.signed if ann else ty.signed
    return widths, signedness


def run_pipeline(kernel_source: str, samples_source: str | None = None,
                 options: PipelineOptions | None = None) -> PipelineReport:
    opt = options or PipelineOptions()
    warnings: list[str] = []

    kernel = _stage("parse", parse, kernel_source)
    analysis, live = analyze_stage(kernel)
    widths, signedness = width_maps(kernel, analysis)

    samples: list[SampleInput] = []
    if samples_source:
        samples = _stage("samples", parse_samples, samples_source)

    float_vals = [v for v, t in kernel.value_types().items()
                  if t.kind == "float"]
    formats = {}
    tuner_info: dict = {"tuned": False}
    if float_vals:
        if samples:
            report = _stage("tune", tune, kernel, samples, opt.metric,
                            opt.threshold)
            formats = report.assignment
            tuner_info = {"tuned": True, "sweeps": report.sweeps,
                          "probes": report.probes,
                          "scores": {k: round(v, 9) for k, v in
                                     report.worst_scores.items()}}
        else:
            formats = {v: F32_FORMAT for v in float_vals}
            warnings.append("float kernel without samples: all floats kept "
                            "at 32 bits")

    alloc = _stage("allocate", allocate, kernel, widths, live,
                   formats or None, signedness)
    packed_pressure = register_pressure(alloc, live)

    regs_before = max(1, alloc.baseline_pressure)
    regs_after = max(1, packed_pressure)
    occ_before = _stage("occupancy", occupancy, regs_before,
                        opt.warps_per_block, opt.shared_mem_per_block,
                        opt.machine)
    occ_after = _stage("occupancy", occupancy, regs_after,
                       opt.warps_per_block, opt.shared_mem_per_block,
                       opt.machine)

    sim_base = sim_pack = None
    if opt.run_simulation:
        inputs = _first_binding(kernel, samples)
        if inputs is None:
            warnings.append("kernel has parameters but no samples: "
                            "simulation skipped")
        else:
            warps = max(1, opt.sim_warps)
            trace = _stage("trace", build_trace, kernel, alloc, warps, inputs,
                           max_steps=opt.trace_steps, assignment=formats or None)
            sim_base = _stage("simulate", simulate, trace, alloc, warps,
                              opt.sim_config, "baseline")
            sim_pack = _stage("simulate", simulate, trace, alloc, warps,
                              opt.sim_config, "packed", opt.writeback_delay)

    area = _stage("area", area_estimate, opt.arch)

    return PipelineReport(
        kernel=kernel.name,
        widths=analysis.export_widths(),
        variables={k: w.as_dict() for k, w in sorted(analysis.per_variable.items())},
        formats={v: f.total_bits for v, f in sorted(formats.items())},
        pressure={"baseline": alloc.baseline_pressure, "packed": packed_pressure,
                  "physical_registers": alloc.physical_registers_used,
                  "splits": alloc.split_count},
        table_dump=dump_table(alloc),
        occupancy_before=occ_before,
        occupancy_after=occ_after,
        sim_baseline=sim_base,
        sim_packed=sim_pack,
        area=area.as_dict(),
        tuner=tuner_info,
        warnings=warnings,
    )


def _first_binding(kernel: Kernel, samples: list[SampleInput]) -> dict | None:
    if not kernel.params:
        return {}
    if not samples:
        return None
    return expand_sample(kernel, samples[0])[0]
