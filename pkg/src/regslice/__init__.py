"""Static register compression for SSA GPU-style kernels.

The toolkit shrinks a kernel's register footprint at compile time: integer
value-range analysis and float precision tuning annotate every operand
with the bits it actually needs, a slice allocator packs the annotated
operands into 4-bit slices of physical registers behind an indirection
table, and a cycle-approximate simulator of the extended operand collector
quantifies the occupancy and IPC effects.
"""

from .allocator import (AllocationError, AllocationResult, IndirectionEntry,
                        OperandInfo, allocate, dump_table, load_table,
                        register_pressure, round_width_to_slices)
from .area import AreaModel, area_estimate
from .datapath import (RegisterFile, expand_mask, extract_operand, or_merge,
                       value_extract, value_truncate)
from .interp import ExecResult, InterpError, interpret
from .ir import (F32, I32, U32, BasicBlock, Instruction, Kernel, Param,
                 ScalarType, validate)
from .liveness import LiveRanges, compute_live_ranges
from .minifloat import (FORMATS, FORMATS_BY_BITS, F32_FORMAT, FloatFormat,
                        NarrowFloatBits, convert_down, convert_up, storage_round)
from .occupancy import Machine, OccupancyResult, occupancy
from .parser import ParseError, format_kernel, parse
from .pipeline import (PipelineError, PipelineOptions, PipelineReport,
                       run_pipeline)
from .rangeanalysis import (EMPTY, TOP, ESSAKernel, Interval, RangeAnalysis,
                            WidthAnnotation, analyze_kernel, bitwidth,
                            from_essa, hull, intersect, merge_ranges, phi_webs,
                            solve_ranges, to_essa)
from .sim import (SimConfig, SimError, SimResult, TraceEvent, build_trace,
                  format_trace, identity_allocation,
                  identity_allocation_for_trace, parse_trace, simulate)
from .tuner import (METRIC_BINARY, METRIC_DEVIATION, QualityResult, SampleInput,
                    TuneReport, expand_sample, parse_samples, quality,
                    run_sample, tune)

__version__ = "0.1.0"

__all__ = [
    "AllocationError", "AllocationResult", "AreaModel", "BasicBlock",
    "EMPTY", "ESSAKernel", "ExecResult", "F32", "F32_FORMAT", "FORMATS",
    "FORMATS_BY_BITS", "FloatFormat", "I32", "IndirectionEntry", "Instruction",
    "InterpError", "Interval", "Kernel", "LiveRanges", "METRIC_BINARY",
    "METRIC_DEVIATION", "Machine", "NarrowFloatBits", "OccupancyResult",
    "OperandInfo", "Param", "ParseError", "PipelineError", "PipelineOptions",
    "PipelineReport", "QualityResult", "RangeAnalysis", "RegisterFile",
    "SampleInput", "ScalarType", "SimConfig", "SimError", "SimResult", "TOP",
    "TraceEvent", "TuneReport", "U32", "WidthAnnotation", "allocate",
    "analyze_kernel", "area_estimate", "bitwidth", "build_trace",
    "compute_live_ranges", "convert_down", "convert_up", "dump_table",
    "expand_mask", "expand_sample", "extract_operand", "format_kernel",
    "format_trace", "from_essa", "hull", "identity_allocation",
    "identity_allocation_for_trace", "interpret",
    "intersect", "load_table", "merge_ranges", "occupancy", "or_merge",
    "parse", "parse_samples", "parse_trace", "phi_webs", "quality",
    "register_pressure", "round_width_to_slices", "run_pipeline", "run_sample",
    "simulate", "solve_ranges", "storage_round", "to_essa", "tune",
    "validate", "value_extract", "value_truncate",
]
