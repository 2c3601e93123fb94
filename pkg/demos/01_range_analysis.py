"""Walk through the integer range analysis on the bundled loop nest.

The kernel runs two nested counter loops. The outer counter k is bounded
by its exit test at 50; the inner counter i chases a copy of k. Static
analysis proves every one of these values fits in 6 bits, so each can
live in two 4-bit register slices instead of a full 32-bit register.
"""

from regslice import analyze_kernel, format_kernel, solve_ranges, to_essa
from regslice.bundled import load_kernel

kernel = load_kernel("loopnest")
print("=== the kernel ===")
print(format_kernel(kernel))

print("=== after e-SSA conversion ===")
essa = to_essa(kernel)
for info in essa.sigmas.values():
    other = info.other if isinstance(info.other, str) else f"constant {info.other}"
    print(f"  {info.name} = {info.source} constrained by "
          f"'{info.source} {info.pred_op} {other}' in block {info.block}")

print("\n=== solved ranges per e-SSA value ===")
for value, interval in sorted(solve_ranges(essa).items()):
    print(f"  I[{value}] = {interval}")

print("\n=== merged per variable, with required bits ===")
analysis = analyze_kernel(kernel)
for name, ann in sorted(analysis.per_variable.items()):
    print(f"  {name}: [{ann.lo}, {ann.hi}]  ->  {ann.bits} bits")
