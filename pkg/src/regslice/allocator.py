"""Packing of width-annotated operands into 4-bit register slices.

Every 32-bit physical register is divided into eight slices. An operand
takes ceil(width/4) slices and may be split across at most two physical
registers (the collector's OR-merge supports exactly two parts). The
indirection table holds one 32-bit entry per architectural register:
[r0:8 | m0:8 | r1:8 | m1:8], where bit i of a mask selects slice i (bits
4i..4i+3). Data slices fill set mask bits in ascending physical-slice
order, least-significant operand slice first, r0's slices before r1's.

Allocation is a linear scan in liveness order with first-fit placement:
contiguous run in a live register, then any free slices of one register,
then a two-register split, then a fresh register. If the split-enabled
result ever needs more registers than the all-32-bit baseline, the
allocator falls back to the split-free packing, which by construction
never exceeds the baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ir import Kernel
from .liveness import LiveRanges
from .minifloat import FloatFormat

NUM_SLICES = 8
ARCH_REGISTERS = 256


class AllocationError(Exception):
    pass


def popcount(x: int) -> int:
    return bin(x).count("1")


def round_width_to_slices(bits: int) -> int:
    """Slices needed for an operand width; 4 bits per slice."""
    if not 1 <= bits <= 32:
        raise AllocationError(f"operand width {bits} outside 1..32")
    return (bits + 3) // 4


def mask_from_slices(slices) -> int:
    m = 0
    for s in slices:
        if not 0 <= s < NUM_SLICES:
            raise AllocationError(f"slice index {s} outside 0..7")
        m |= 1 << s
    return m


def slices_from_mask(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(NUM_SLICES) if mask >> i & 1)


@dataclass(frozen=True)
class IndirectionEntry:
    r0: int
    m0: int
    r1: int = 0
    m1: int = 0

    def __post_init__(self):
        assert 0 <= self.r0 < ARCH_REGISTERS and 0 <= self.r1 < ARCH_REGISTERS
        assert 0 < self.m0 <= 0xFF and 0 <= self.m1 <= 0xFF

    @property
    def split(self) -> bool:
        return self.m1 != 0

    @property
    def slice_count(self) -> int:
        return popcount(self.m0) + popcount(self.m1)

    def parts(self) -> tuple[tuple[int, int], ...]:
        if self.m1:
            return ((self.r0, self.m0), (self.r1, self.m1))
        return ((self.r0, self.m0),)

    def encode(self) -> int:
        """32-bit table row: r0 in the top byte, m1 in the bottom byte."""
        return (self.r0 << 24) | (self.m0 << 16) | (self.r1 << 8) | self.m1

    @staticmethod
    def decode(word: int) -> "IndirectionEntry":
        return IndirectionEntry(word >> 24 & 0xFF, word >> 16 & 0xFF,
                                word >> 8 & 0xFF, word & 0xFF)


@dataclass(frozen=True)
class OperandInfo:
    """Per-value metadata the datapath needs alongside the table entry."""
    value: str
    arch_reg: int
    width: int
    signed: bool
    float_format: FloatFormat | None
    entry: IndirectionEntry


@dataclass
class AllocationResult:
    entries: dict[str, IndirectionEntry]
    operands: dict[str, OperandInfo]
    arch_regs: dict[str, int]
    register_pressure: int
    baseline_pressure: int
    physical_registers_used: int
    split_count: int
    fragmentation: dict = field(default_factory=dict)  # point -> wasted slices

    def table_rows(self) -> list[int]:
        rows = [0] * ARCH_REGISTERS
        for v, e in self.entries.items():
            rows[self.arch_regs[v]] = e.encode()
        return rows


def dump_table(alloc: AllocationResult) -> str:
    """256 rows of 32 bits as fixed-width hex text, one row per line."""
    return "\n".join(f"{row:08x}" for row in alloc.table_rows()) + "\n"


def load_table(text: str) -> list[IndirectionEntry | None]:
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        word = int(line, 16)
        rows.append(IndirectionEntry.decode(word) if word >> 16 & 0xFF else None)
    if len(rows) != ARCH_REGISTERS:
        raise AllocationError(f"table has {len(rows)} rows, expected {ARCH_REGISTERS}")
    return rows


def slices_needed(value: str, widths: dict[str, int],
                  formats: dict[str, FloatFormat] | None) -> int:
    if formats and value in formats:
        return formats[value].total_bits // 4
    return round_width_to_slices(widths[value])


def allocate(kernel: Kernel, widths: dict[str, int], live: LiveRanges,
             formats: dict[str, FloatFormat] | None = None,
             signedness: dict[str, bool] | None = None,
             allow_split: bool = True) -> AllocationResult:
    """Pack all live values of the kernel into slices.

    `widths` gives the integer bit width per value id; float values take
    their storage format's width from `formats` instead. Values that are
    never live get no entry. Allocation always succeeds; the result never
    needs more simultaneously live physical registers than the all-32-bit
    baseline.
    """
    values = [v for v in _definition_order(kernel) if live.live_points(v)]
    if len(values) > ARCH_REGISTERS:
        raise AllocationError(f"{len(values)} live values exceed the "
                              f"{ARCH_REGISTERS}-entry indirection table")
    for v in values:
        if (formats is None or v not in formats) and v not in widths:
            raise AllocationError(f"no width annotation for value {v}")

    arch_regs = {v: i for i, v in enumerate(_definition_order(kernel))
                 if i < ARCH_REGISTERS}
    baseline = live.max_live

    best = _first_fit(kernel, values, widths, formats, live, allow_split)
    if allow_split:
        nosplit = _first_fit(kernel, values, widths, formats, live, False)
        if nosplit[1] < best[1]:
            best = nosplit
    placements, pressure, used, splits = best
    if pressure > baseline:
        # cannot happen for split-free packing; guarded anyway
        raise AllocationError("packed pressure exceeded the 32-bit baseline")

    entries = {}
    operands = {}
    for v in values:
        parts = placements[v]
        if len(parts) == 1:
            (r0, s0), = parts
            e = IndirectionEntry(r0, mask_from_slices(s0))
        else:
            (r0, s0), (r1, s1) = parts
            e = IndirectionEntry(r0, mask_from_slices(s0), r1, mask_from_slices(s1))
        entries[v] = e
        operands[v] = OperandInfo(
            value=v, arch_reg=arch_regs[v],
            width=(formats[v].total_bits if formats and v in formats
                   else widths[v]),
            signed=bool(signedness.get(v, False)) if signedness else False,
            float_format=formats.get(v) if formats else None,
            entry=e)

    frag = _fragmentation(live, entries)
    return AllocationResult(entries, operands, arch_regs, pressure, baseline,
                            used, splits, frag)


def _definition_order(kernel: Kernel) -> list[str]:
    order = [p.name for p in kernel.params]
    for b in kernel.blocks:
        for ins in b.instructions:
            if ins.dest is not None:
                order.append(ins.dest)
    return order


def _first_fit(kernel, values, widths, formats, live, allow_split):
    # reg -> list of (value, slice set); overlap tested against the new value
    contents: dict[int, list[tuple[str, set[int]]]] = {}
    placements: dict[str, list[tuple[int, list[int]]]] = {}
    splits = 0

    def used_mask(reg: int, value: str) -> int:
        m = 0
        for other, sl in contents.get(reg, ()):
            if live.overlaps(other, value):
                m |= mask_from_slices(sl)
        return m

    def contiguous_run(free: int, need: int) -> list[int] | None:
        run = 0
        for i in range(NUM_SLICES):
            run = run + 1 if free >> i & 1 else 0
            if run == need:
                return list(range(i - need + 1, i + 1))
        return None

    for v in values:
        need = slices_needed(v, widths, formats)
        actives = []
        for reg in sorted(contents):
            used = used_mask(reg, v)
            free = ~used & 0xFF
            if used and free:
                actives.append((reg, free))

        chosen: list[tuple[int, list[int]]] | None = None
        for reg, free in actives:
            run = contiguous_run(free, need)
            if run is not None:
                chosen = [(reg, run)]
                break
        if chosen is None:
            for reg, free in actives:
                if popcount(free) >= need:
                    chosen = [(reg, list(slices_from_mask(free))[:need])]
                    break
        if chosen is None and allow_split and need > 1:
            for i, (reg_a, free_a) in enumerate(actives):
                take = min(popcount(free_a), need - 1)
                rest = need - take
                for reg_b, free_b in actives:
                    if reg_b == reg_a or popcount(free_b) < rest:
                        continue
                    chosen = [(reg_a, list(slices_from_mask(free_a))[:take]),
                              (reg_b, list(slices_from_mask(free_b))[:rest])]
                    splits += 1
                    break
                if chosen is not None:
                    break
        if chosen is None:
            reg = 0
            while used_mask(reg, v):
                reg += 1
                if reg >= ARCH_REGISTERS:
                    raise AllocationError("out of physical registers")
            chosen = [(reg, list(range(need)))]

        placements[v] = chosen
        for reg, sl in chosen:
            contents.setdefault(reg, []).append((v, set(sl)))

    pressure = _pressure_from(placements, live)
    used = len(contents)
    return placements, pressure, used, splits


def _pressure_from(placements, live) -> int:
    best = 0
    for p, live_set in live.live_in.items():
        regs = set()
        for v in live_set:
            for reg, _ in placements.get(v, ()):
                regs.add(reg)
        best = max(best, len(regs))
    return best


def _fragmentation(live, entries) -> dict:
    frag = {}
    for p, live_set in live.live_in.items():
        used: dict[int, int] = {}
        for v in live_set:
            e = entries.get(v)
            if e is None:
                continue
            for reg, mask in e.parts():
                used[reg] = used.get(reg, 0) | mask
        frag[p] = sum(NUM_SLICES - popcount(m) for m in used.values())
    return frag


def register_pressure(alloc: AllocationResult, live: LiveRanges) -> int:
    """Recount: max distinct physical registers referenced by live values."""
    best = 0
    for p, live_set in live.live_in.items():
        regs = set()
        for v in live_set:
            e = alloc.entries.get(v)
            if e is None:
                continue
            for reg, _ in e.parts():
                regs.add(reg)
        best = max(best, len(regs))
    return best
