"""Float precision tuning against a quality threshold.

Tuning is data driven: it takes the kernel, a set of sample inputs, a
quality metric, and a threshold, and finds for every float-typed value the
narrowest storage format that keeps the output quality within the
threshold on every sample. No guarantee is made for inputs outside the
sample set. The worst case assignment (all values at 32 bits) is exact and
therefore always satisfies any threshold.

Sample files are plain text, one `[name]` section per sample; each line
binds a parameter to a scalar or a comma separated array. Array bindings
of equal length run the kernel once per element and concatenate the
outputs, scalars broadcast.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .interp import interpret
from .ir import Kernel
from .minifloat import F32_FORMAT, NARROWEST_FIRST, float_to_bits32

EPSILON = 1e-12

METRIC_DEVIATION = "deviation"
METRIC_BINARY = "binary"


# ---------------------------------------------------------------------------
# Sample inputs

@dataclass(frozen=True)
class SampleInput:
    name: str
    bindings: dict

    def element_count(self) -> int:
        n = 1
        for v in self.bindings.values():
            if isinstance(v, list):
                n = max(n, len(v))
        return n


class SampleError(ValueError):
    pass


_section_re = re.compile(r"\[([A-Za-z_][A-Za-z0-9_.-]*)\]$")


def parse_samples(text: str) -> list[SampleInput]:
    samples: list[SampleInput] = []
    name = None
    bindings: dict = {}

    def flush():
        nonlocal name, bindings
        if name is not None:
            samples.append(SampleInput(name, bindings))
        name, bindings = None, {}

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _section_re.match(line)
        if m:
            flush()
            name = m.group(1)
            continue
        if name is None:
            raise SampleError(f"line {lineno}: binding outside a [sample] section")
        if "=" not in line:
            raise SampleError(f"line {lineno}: expected 'param = values'")
        key, rhs = line.split("=", 1)
        key = key.strip()
        vals = [_parse_scalar(tok.strip(), lineno) for tok in rhs.split(",")]
        bindings[key] = vals[0] if len(vals) == 1 else vals
    flush()
    if not samples:
        raise SampleError("sample file defines no samples")
    return samples


def _parse_scalar(tok: str, lineno: int):
    if re.fullmatch(r"[+-]?\d+", tok):
        return int(tok)
    try:
        return float(tok)
    except ValueError:
        raise SampleError(f"line {lineno}: bad value {tok!r}") from None


def expand_sample(kernel: Kernel, sample: SampleInput) -> list[dict]:
    """Per-element scalar bindings: arrays zip together, scalars broadcast."""
    param_names = [p.name for p in kernel.params]
    for key in sample.bindings:
        if key not in param_names:
            raise SampleError(f"sample {sample.name!r} binds unknown parameter {key!r}")
    lengths = {len(v) for v in sample.bindings.values() if isinstance(v, list)}
    if len(lengths) > 1:
        raise SampleError(f"sample {sample.name!r} mixes array lengths {sorted(lengths)}")
    n = lengths.pop() if lengths else 1

    out = []
    for i in range(n):
        b = {}
        for p in kernel.params:
            if p.name not in sample.bindings:
                raise SampleError(f"sample {sample.name!r} misses parameter {p.name!r}")
            v = sample.bindings[p.name]
            v = v[i] if isinstance(v, list) else v
            if p.declared_range is not None:
                lo, hi = p.declared_range
                if not lo <= v <= hi:
                    raise SampleError(
                        f"sample {sample.name!r}: {p.name}={v} outside its "
                        f"declared range [{lo}, {hi}]")
            b[p.name] = v
        out.append(b)
    return out


def run_sample(kernel: Kernel, sample: SampleInput,
               assignment: dict | None = None, *, rounding: str = "round",
               max_steps: int = 1_000_000) -> list:
    outputs: list = []
    for binding in expand_sample(kernel, sample):
        outputs.extend(interpret(kernel, binding, assignment,
                                 rounding=rounding, max_steps=max_steps).outputs)
    return outputs


# ---------------------------------------------------------------------------
# Quality

@dataclass(frozen=True)
class QualityResult:
    score: float
    passed: bool


def _bits_equal(a, b) -> bool:
    a_f = isinstance(a, (float, np.floating))
    b_f = isinstance(b, (float, np.floating))
    if a_f != b_f:
        return False
    if a_f:
        return float_to_bits32(float(a)) == float_to_bits32(float(b))
    return a == b


def quality(reference: list, candidate: list, metric: str = METRIC_DEVIATION,
            threshold: float = 0.0, epsilon: float = EPSILON) -> QualityResult:
    """Score a candidate output against the 32-bit reference.

    deviation: 100 * mean(|cand - ref| / max(|ref|, epsilon)) over output
    elements; elements that are bitwise identical contribute zero, which
    also makes NaN == NaN and -0 == +0 exact matches. binary: pass only if
    every element is bitwise identical (score is 0 or 100).
    """
    if len(reference) != len(candidate):
        raise ValueError(f"output shapes differ: {len(reference)} vs {len(candidate)}")
    if metric == METRIC_BINARY:
        ok = all(_bits_equal(r, c) for r, c in zip(reference, candidate))
        return QualityResult(0.0 if ok else 100.0, ok)
    if metric != METRIC_DEVIATION:
        raise ValueError(f"unknown metric {metric!r}")
    if not reference:
        return QualityResult(0.0, True)
    total = 0.0
    for r, c in zip(reference, candidate):
        if _bits_equal(r, c):
            continue
        d = abs(float(c) - float(r)) / max(abs(float(r)), epsilon)
        if math.isnan(d):
            d = math.inf
        total += d
    score = 100.0 * total / len(reference)
    return QualityResult(score, score <= threshold)


# ---------------------------------------------------------------------------
# Tuning

@dataclass
class TuneReport:
    assignment: dict
    sweeps: int
    probes: int
    worst_scores: dict = field(default_factory=dict)  # sample name -> score


def float_values(kernel: Kernel) -> list[str]:
    """Float-typed values in definition order, parameters first."""
    out = [p.name for p in kernel.params if p.type.kind == "float"]
    for b in kernel.blocks:
        for ins in b.instructions:
            if ins.dest is not None and ins.type is not None \
                    and ins.type.kind == "float" and ins.opcode != "cmp":
                out.append(ins.dest)
    return out


def tune(kernel: Kernel, samples: list[SampleInput], metric: str = METRIC_DEVIATION,
         threshold: float = 0.0, *, max_sweeps: int = 3,
         rounding: str = "round", max_steps: int = 1_000_000) -> TuneReport:
    """Greedy descending sweep over float values.

    Values are visited in definition order; each one keeps the narrowest
    format that still meets the threshold on every sample with all other
    values at their current formats. Sweeps repeat to a fixed point (at
    most `max_sweeps`). The returned assignment is re-checked against
    every sample before it is handed back.
    """
    if not samples:
        raise ValueError("tuning needs at least one sample input")
    values = float_values(kernel)
    assignment = {v: F32_FORMAT for v in values}
    if not values:
        return TuneReport({}, 0, 0)

    references = [run_sample(kernel, s, None, rounding=rounding,
                             max_steps=max_steps) for s in samples]
    probes = 0

    def passes(a) -> bool:
        nonlocal probes
        for s, ref in zip(samples, references):
            probes += 1
            cand = run_sample(kernel, s, a, rounding=rounding, max_steps=max_steps)
            if not quality(ref, cand, metric, threshold).passed:
                return False  # later samples short-circuit
        return True

    sweeps = 0
    for _ in range(max_sweeps):
        sweeps += 1
        changed = False
        for v in values:
            current = assignment[v]
            for fmt in NARROWEST_FIRST:
                if fmt.total_bits >= current.total_bits:
                    break
                trial = dict(assignment)
                trial[v] = fmt
                if passes(trial):
                    assignment = trial
                    changed = True
                    break
        if not changed:
            break

    worst: dict[str, float] = {}
    for s, ref in zip(samples, references):
        cand = run_sample(kernel, s, assignment, rounding=rounding,
                          max_steps=max_steps)
        q = quality(ref, cand, metric, threshold)
        worst[s.name] = q.score
        if not q.passed:
            raise AssertionError(
                f"tuned assignment fails its own threshold on sample {s.name}")
    return TuneReport(assignment, sweeps, probes, worst)
