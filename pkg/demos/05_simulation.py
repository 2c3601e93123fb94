"""Measure what packing costs and buys in the operand collector model.

Three experiments on synthetic traces:
 1. an independent instruction stream, where the packed design's extra
    source-indirection stage costs exactly one cycle end to end;
 2. a dependent chain swept over writeback delays, showing how the
    scoreboard amplifies the deeper writeback path;
 3. a latency-bound workload run at rising occupancy, where the extra
    warps that packing admits translate into IPC.
"""

from regslice import TraceEvent, simulate
from regslice.sim import identity_allocation_for_trace

print("=== 1. independent stream: one extra pipeline stage ===")
stream = [TraceEvent(0, "spu", (0, 1), 10 + i) for i in range(20)]
alloc = identity_allocation_for_trace(stream)
base = simulate(stream, alloc, mode="baseline")
pack = simulate(stream, alloc, mode="packed", writeback_delay=1)
print(f"  baseline {base.cycles} cycles, packed {pack.cycles} cycles "
      f"(+{pack.cycles - base.cycles})")

print("\n=== 2. dependent chain vs writeback delay ===")
chain = []
prev = 0
for i in range(30):
    chain.append(TraceEvent(0, "spu", (prev,), 1 + i % 100))
    prev = 1 + i % 100
chain_alloc = identity_allocation_for_trace(chain)
for wd in (0, 2, 4, 8):
    r = simulate(chain, chain_alloc, mode="packed", writeback_delay=wd)
    print(f"  writeback delay {wd}: {r.cycles} cycles, IPC {r.ipc:.3f}, "
          f"scoreboard stalls {r.stalls['scoreboard']}")

print("\n=== 3. occupancy vs IPC on a latency-bound trace ===")
def latency_trace(warps):
    t = []
    for w in range(warps):
        prev = 0
        for i in range(12):
            dst = 1 + (i % 40)
            t.append(TraceEvent(w, "ldst" if i % 3 == 0 else "spu", (prev,), dst))
            prev = dst
    return t

for warps in (5, 10, 20, 30, 40):
    t = latency_trace(warps)
    r = simulate(t, identity_allocation_for_trace(t), mode="packed")
    bar = "#" * int(r.ipc * 60)
    print(f"  {warps:2d} warps: IPC {r.ipc:.3f} {bar}")
