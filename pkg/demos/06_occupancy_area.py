"""The arithmetic that motivates the whole exercise, plus what it costs.

Occupancy: a thread needing 52 registers fits one 10-warp block into a
32K-register core (21% occupancy); squeezed to 29 registers, three blocks
fit (62.5%). Shared memory can take over as the binding constraint.

Area: the added structures (value extractors, converters, indirection
tables, truncators, collector-unit extensions) cost about 1.8M
transistors per Fermi SM, under 1% of the chip.
"""

from regslice import area_estimate, occupancy

print("=== occupancy ladder (10 warps per block, no shared memory) ===")
for regs in (52, 46, 36, 29, 24):
    r = occupancy(regs, 10, 0)
    print(f"  {regs:2d} regs/thread: {r.blocks} block(s), {r.active_warps:2d} "
          f"warps, {r.display():>14}  limited by {r.limiter}")

print("\n=== shared memory taking over ===")
r = occupancy(24, 10, 14560)
print(f"  24 regs + 14,560 B shmem/block: {r.blocks} blocks ({r.limiter})")

print("\n=== area overhead ===")
for arch in ("fermi", "volta"):
    m = area_estimate(arch)
    print(f"  {arch}: per block {m.per_block_total:,}, per SM "
          f"{m.per_sm_total:,}, chip {m.chip_total:,} "
          f"(reported ~{m.chip_reported:,})")
    for part, count in m.parts.items():
        print(f"      {part:26s} {count:>9,}")
