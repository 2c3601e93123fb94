"""Tune float storage widths against an output quality threshold.

The tuner runs the kernel on sample inputs, then greedily narrows each
float value to the smallest format that keeps the output within the
threshold. A 0% threshold with the deviation metric still allows
narrowing wherever the rounding provably cancels out; a 10% threshold
buys much narrower formats.
"""

from regslice import METRIC_DEVIATION, quality, run_sample, tune
from regslice.bundled import load_kernel, samples_text
from regslice.tuner import parse_samples

kernel = load_kernel("poly3")
samples = parse_samples(samples_text("poly3"))

for threshold in (0.0, 1.0, 10.0):
    report = tune(kernel, samples, METRIC_DEVIATION, threshold)
    bits = {v: f.total_bits for v, f in report.assignment.items()}
    total = sum(bits.values())
    print(f"threshold {threshold:>4}%: {bits}")
    print(f"   total storage {total} bits "
          f"(down from {32 * len(bits)}), {report.probes} probe runs")
    for s in samples:
        ref = run_sample(kernel, s, None)
        cand = run_sample(kernel, s, report.assignment)
        q = quality(ref, cand, METRIC_DEVIATION, threshold)
        print(f"   sample {s.name}: deviation {q.score:.5f}%")
