"""Closed-form occupancy arithmetic.

Blocks are assigned to a streaming multiprocessor whole; the binding
constraint among register capacity, shared memory, and the warp cap
determines how many fit, and occupancy is active warps over max warps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

LIMITERS = ("registers", "shared-mem", "max-warps")


@dataclass(frozen=True)
class Machine:
    thread_registers: int = 32768
    max_warps: int = 48
    shared_memory: int = 49152
    warp_size: int = 32


@dataclass(frozen=True)
class OccupancyResult:
    blocks: int
    active_warps: int
    occupancy_percent: float
    occupancy_fraction: Fraction
    limiter: str

    @property
    def rounded_percent(self) -> int:
        import math
        return math.floor(self.occupancy_percent + 0.5)

    def display(self) -> str:
        pct = self.occupancy_percent
        if pct == int(pct):
            return f"{int(pct)}%"
        return f"{pct:.1f}% (~{self.rounded_percent}%)"


def occupancy(registers_per_thread: int, warps_per_block: int,
              shared_mem_bytes_per_block: int = 0,
              machine: Machine = Machine()) -> OccupancyResult:
    """Blocks, warps, and occupancy for one kernel configuration.

    A kernel whose single block does not fit the register file reports
    zero blocks (unlaunchable) rather than raising.
    """
    if registers_per_thread < 1 or warps_per_block < 1:
        raise ValueError("registers per thread and warps per block must be positive")
    if warps_per_block > machine.max_warps:
        raise ValueError(f"warps_per_block {warps_per_block} exceeds "
                         f"max_warps {machine.max_warps}")
    if shared_mem_bytes_per_block < 0:
        raise ValueError("shared memory per block cannot be negative")

    regs_per_block = registers_per_thread * machine.warp_size * warps_per_block
    by_regs = machine.thread_registers // regs_per_block
    by_shmem = (machine.shared_memory // shared_mem_bytes_per_block
                if shared_mem_bytes_per_block else None)
    by_warps = machine.max_warps // warps_per_block

    candidates = {"registers": by_regs, "max-warps": by_warps}
    if by_shmem is not None:
        candidates["shared-mem"] = by_shmem
    blocks = min(candidates.values())
    limiter = next(l for l in LIMITERS if candidates.get(l) == blocks)

    warps = blocks * warps_per_block
    frac = Fraction(warps, machine.max_warps)
    return OccupancyResult(blocks, warps, float(frac * 100), frac, limiter)
