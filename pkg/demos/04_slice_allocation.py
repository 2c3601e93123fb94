"""Pack width-annotated operands into 4-bit slices behind the table.

Every architectural register maps through a 32-bit indirection entry
[r0 | m0 | r1 | m1]: up to two physical registers with a slice mask each.
Values that are never live together may share slices, and a cramped
operand can split across two registers, so the register pressure drops
from "one register per live value" to "one register per eight live
slices".
"""

from regslice import allocate, compute_live_ranges, register_pressure
from regslice.allocator import slices_from_mask
from regslice.bundled import load_kernel
from regslice.rangeanalysis import analyze_kernel

kernel = load_kernel("loopnest")
live = compute_live_ranges(kernel)
analysis = analyze_kernel(kernel)
widths = {v: a.bits for v, a in analysis.per_value.items()}
signed = {v: a.signed for v, a in analysis.per_value.items()}

alloc = allocate(kernel, widths, live, signedness=signed)
print(f"baseline register pressure : {alloc.baseline_pressure}")
print(f"packed register pressure   : {register_pressure(alloc, live)}")
print(f"physical registers touched : {alloc.physical_registers_used}")
print(f"split operands             : {alloc.split_count}")

print("\nindirection entries:")
for value, entry in sorted(alloc.entries.items()):
    parts = " + ".join(f"r{reg} slices {list(slices_from_mask(mask))}"
                       for reg, mask in entry.parts())
    print(f"  {value:5s} ({widths[value]:2d} bits, arch reg "
          f"{alloc.arch_regs[value]:3d}) -> {parts}   word 0x{entry.encode():08x}")

worst = max(alloc.fragmentation.values())
print(f"\nworst-case wasted slices at any program point: {worst}")
