"""Backward-dataflow liveness over the kernel CFG.

A program point (block, i) denotes the moment just before instruction i
executes; a value is live there if some path from that point reaches a use
of it. Phi operands count as uses at the end of the corresponding
predecessor block, and phi destinations are defined on block entry.
The maximum number of values live at any single point is the baseline
register pressure when every operand occupies a full 32-bit register.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ir import Kernel, predecessors

Point = tuple[str, int]


@dataclass(frozen=True)
class LiveRanges:
    points: tuple[Point, ...]
    live_in: dict[Point, frozenset[str]]
    by_value: dict[str, frozenset[Point]]
    max_live: int
    max_live_point: Point | None

    def live_points(self, value: str) -> frozenset[Point]:
        return self.by_value.get(value, frozenset())

    def overlaps(self, a: str, b: str) -> bool:
        pa, pb = self.live_points(a), self.live_points(b)
        if len(pa) > len(pb):
            pa, pb = pb, pa
        return any(p in pb for p in pa)


def compute_live_ranges(kernel: Kernel) -> LiveRanges:
    preds = predecessors(kernel)
    blocks = {b.label: b for b in kernel.blocks}

    # per-block gen/kill, with phi reads attributed to predecessor edges
    uses: dict[str, set[str]] = {l: set() for l in blocks}
    defs: dict[str, set[str]] = {l: set() for l in blocks}
    edge_uses: dict[str, set[str]] = {l: set() for l in blocks}  # at end of block
    for b in kernel.blocks:
        seen: set[str] = set()
        for ins in b.instructions:
            if ins.opcode == "phi":
                seen.add(ins.dest)
                defs[b.label].add(ins.dest)
                for o, pred in zip(ins.operands, ins.phi_labels):
                    if isinstance(o, str) and pred in edge_uses:
                        edge_uses[pred].add(o)
                continue
            for o in ins.operands:
                if isinstance(o, str) and o not in seen:
                    uses[b.label].add(o)
            if ins.dest is not None:
                seen.add(ins.dest)
                defs[b.label].add(ins.dest)

    live_out: dict[str, set[str]] = {l: set() for l in blocks}
    live_in_block: dict[str, set[str]] = {l: set() for l in blocks}
    changed = True
    while changed:
        changed = False
        for b in reversed(kernel.blocks):
            l = b.label
            out = set(edge_uses[l])
            for t in b.terminator.targets:
                if t in live_in_block:
                    out |= live_in_block[t]
            inn = uses[l] | (out - defs[l])
            if out != live_out[l] or inn != live_in_block[l]:
                live_out[l], live_in_block[l] = out, inn
                changed = True

    # expand to per-instruction live-in sets by walking blocks backward
    live_in: dict[Point, frozenset[str]] = {}
    points: list[Point] = []
    for b in kernel.blocks:
        live = set(live_out[b.label])
        per_block: list[frozenset[str]] = [frozenset()] * len(b.instructions)
        for i in range(len(b.instructions) - 1, -1, -1):
            ins = b.instructions[i]
            if ins.dest is not None:
                live.discard(ins.dest)
            if ins.opcode != "phi":
                for o in ins.operands:
                    if isinstance(o, str):
                        live.add(o)
            per_block[i] = frozenset(live)
        for i in range(len(b.instructions)):
            points.append((b.label, i))
            live_in[(b.label, i)] = per_block[i]

    by_value: dict[str, set[Point]] = {}
    max_live, max_point = 0, None
    for p in points:
        s = live_in[p]
        if len(s) > max_live:
            max_live, max_point = len(s), p
        for v in s:
            by_value.setdefault(v, set()).add(p)
    return LiveRanges(tuple(points), live_in,
                      {v: frozenset(ps) for v, ps in by_value.items()},
                      max_live, max_point)
