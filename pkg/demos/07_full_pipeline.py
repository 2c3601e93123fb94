"""The whole flow on one float kernel: analyze, tune, allocate, simulate.

Equivalent to `regslice pipeline blend.k --samples blend.samples
--threshold 10`, but driven through the library API.
"""

from regslice import PipelineOptions, run_pipeline
from regslice.bundled import kernel_text, samples_text

options = PipelineOptions(threshold=10.0, sim_warps=4)
report = run_pipeline(kernel_text("blend"), samples_text("blend"), options)

print(report.to_text())
print("machine-readable report keys:", ", ".join(sorted(report.as_dict())))
