"""Integer value-range analysis over e-SSA form.

The kernel is first converted to extended SSA: every conditional branch on
an integer comparison introduces renamed versions (sigma values) of the
compared values on its out-edges, carrying the constraint the branch
implies. A worklist solver then propagates intervals: an ascending phase
with widening to +-inf after a fixed number of visits per value, followed
by resolution of symbolic ("future") bounds from variable-to-variable
comparisons and a descending (narrowing) phase that re-applies the branch
constraints. Loop-header phis get one extra refinement round that
re-evaluates back-edge operands one definition deep under the strict form
of the edge constraints, which recovers the bound a counter loop's exit
test puts on the value flowing around the back edge.

Per-value ranges are merged into per-variable ranges by taking the hull
over each phi web (values connected through phi and sigma nodes), and the
merged range determines the bit width the variable needs.

Solved intervals are sound: no concrete execution assigns a value outside
its interval. They are not guaranteed tight.
"""

from __future__ import annotations

import heapq
import os
from dataclasses import dataclass, replace

from .ir import (BasicBlock, Instruction, Kernel, dominators, predecessors,
                 type_value_range, validate)

WIDEN_VISITS = 3      # ascending visits per value before widening a moving bound
NARROW_ROUNDS = 8     # cap on descending worklist visits per value
FULL_WIDTH_CUTOFF = 28  # widths above this are annotated as full 32-bit


# ---------------------------------------------------------------------------
# Intervals over extended integers. None stands for -inf in `lo` and +inf
# in `hi`. The empty interval is a distinct sentinel for unreachable values.

@dataclass(frozen=True)
class Interval:
    lo: int | None
    hi: int | None
    empty: bool = False

    def __post_init__(self):
        if not self.empty and self.lo is not None and self.hi is not None:
            assert self.lo <= self.hi, (self.lo, self.hi)

    def __repr__(self) -> str:
        if self.empty:
            return "[empty]"
        lo = "-inf" if self.lo is None else str(self.lo)
        hi = "+inf" if self.hi is None else str(self.hi)
        return f"[{lo},{hi}]"

    @property
    def is_const(self) -> bool:
        return not self.empty and self.lo is not None and self.lo == self.hi

    def contains(self, v: int) -> bool:
        if self.empty:
            return False
        if self.lo is not None and v < self.lo:
            return False
        if self.hi is not None and v > self.hi:
            return False
        return True

    def issubset(self, other: "Interval") -> bool:
        if self.empty:
            return True
        if other.empty:
            return False
        if other.lo is not None and (self.lo is None or self.lo < other.lo):
            return False
        if other.hi is not None and (self.hi is None or self.hi > other.hi):
            return False
        return True


EMPTY = Interval(0, 0, empty=True)
TOP = Interval(None, None)


def const(v: int) -> Interval:
    return Interval(v, v)


def hull(a: Interval, b: Interval) -> Interval:
    if a.empty:
        return b
    if b.empty:
        return a
    lo = None if a.lo is None or b.lo is None else min(a.lo, b.lo)
    hi = None if a.hi is None or b.hi is None else max(a.hi, b.hi)
    return Interval(lo, hi)


def intersect(a: Interval, b: Interval) -> Interval:
    if a.empty or b.empty:
        return EMPTY
    lo = b.lo if a.lo is None else (a.lo if b.lo is None else max(a.lo, b.lo))
    hi = b.hi if a.hi is None else (a.hi if b.hi is None else min(a.hi, b.hi))
    if lo is not None and hi is not None and lo > hi:
        return EMPTY
    return Interval(lo, hi)


def _add_bound(a, b):
    if a is None or b is None:
        return None
    return a + b


def iv_add(a: Interval, b: Interval) -> Interval:
    if a.empty or b.empty:
        return EMPTY
    return Interval(_add_bound(a.lo, b.lo), _add_bound(a.hi, b.hi))


def iv_sub(a: Interval, b: Interval) -> Interval:
    if a.empty or b.empty:
        return EMPTY
    lo = None if a.lo is None or b.hi is None else a.lo - b.hi
    hi = None if a.hi is None or b.lo is None else a.hi - b.lo
    return Interval(lo, hi)


def iv_mul(a: Interval, b: Interval) -> Interval:
    if a.empty or b.empty:
        return EMPTY
    # evaluate the four corner products; infinities keep their sign via the
    # sign of the finite factor (0 * inf is treated as 0)
    def corner(x, xs, y, ys):
        # xs/ys: -1 for a lo bound standing for -inf, +1 for a hi bound
        if x == 0 or y == 0:
            return 0
        if x is None and y is None:
            return ("inf", xs * ys)
        if x is None:
            return ("inf", xs * (1 if y > 0 else -1))
        if y is None:
            return ("inf", ys * (1 if x > 0 else -1))
        return x * y

    corners = [
        corner(a.lo, -1, b.lo, -1),
        corner(a.lo, -1, b.hi, +1),
        corner(a.hi, +1, b.lo, -1),
        corner(a.hi, +1, b.hi, +1),
    ]
    lo, hi = None, None
    lo_inf = any(c == ("inf", -1) for c in corners)
    hi_inf = any(c == ("inf", +1) for c in corners)
    finite = [c for c in corners if not isinstance(c, tuple)]
    if not lo_inf and finite:
        lo = min(finite)
    if not hi_inf and finite:
        hi = max(finite)
    if lo_inf:
        lo = None
    if hi_inf:
        hi = None
    if lo is None and hi is None:
        return TOP
    if lo is not None and hi is not None and lo > hi:
        lo, hi = hi, lo
    return Interval(lo, hi)


def iv_min(a: Interval, b: Interval) -> Interval:
    if a.empty or b.empty:
        return EMPTY
    lo = None if a.lo is None or b.lo is None else min(a.lo, b.lo)
    hi = None if a.hi is None and b.hi is None else (
        b.hi if a.hi is None else (a.hi if b.hi is None else min(a.hi, b.hi)))
    return Interval(lo, hi)


def iv_max(a: Interval, b: Interval) -> Interval:
    if a.empty or b.empty:
        return EMPTY
    hi = None if a.hi is None or b.hi is None else max(a.hi, b.hi)
    lo = None if a.lo is None and b.lo is None else (
        b.lo if a.lo is None else (a.lo if b.lo is None else max(a.lo, b.lo)))
    return Interval(lo, hi)


def bitwidth(iv: Interval, signed: bool) -> int:
    """Bits needed to represent every point of the interval, capped at 32.

    Unsigned intervals with lo >= 0 use the plain binary width; signed
    intervals (or any interval reaching below zero) use the minimal two's
    complement width. Any infinite bound yields 32.
    """
    if iv.empty:
        raise ValueError("bitwidth of the empty interval (value never exists)")
    if iv.lo is None or iv.hi is None:
        return 32
    if not signed and iv.lo >= 0:
        return min(32, max(1, iv.hi.bit_length()))
    bits = 1
    while bits < 32:
        if -(1 << (bits - 1)) <= iv.lo and iv.hi <= (1 << (bits - 1)) - 1:
            return bits
        bits += 1
    return 32


# ---------------------------------------------------------------------------
# e-SSA conversion

_NEGATE = {"lt": "ge", "le": "gt", "gt": "le", "ge": "lt", "eq": "ne", "ne": "eq"}
_MIRROR = {"lt": "gt", "le": "ge", "gt": "lt", "ge": "le", "eq": "eq", "ne": "ne"}


@dataclass(frozen=True)
class SigmaInfo:
    """One renaming introduced on a branch out-edge.

    `pred_op` is the comparison that holds for `source` on this edge (after
    negating for the false edge and mirroring when the source was the right
    operand); `other` is the second comparison operand, a constant or a
    value id.
    """
    name: str
    source: str
    pred_op: str
    other: object  # int immediate or value id (str)
    block: str     # block the sigma definition lives in


@dataclass(frozen=True)
class ESSAKernel:
    kernel: Kernel
    original: Kernel
    sigmas: dict[str, SigmaInfo]

    def groups(self) -> dict[str, set[str]]:
        return phi_webs(self.kernel, self.sigmas)


def _constraint_const(pred_op: str, c: int) -> Interval:
    if pred_op == "lt":
        return Interval(None, c - 1)
    if pred_op == "le":
        return Interval(None, c)
    if pred_op == "gt":
        return Interval(c + 1, None)
    if pred_op == "ge":
        return Interval(c, None)
    if pred_op == "eq":
        return const(c)
    return TOP  # ne carries no interval information


def _constraint_future(pred_op: str, other: Interval) -> Interval:
    # Bounds borrowed from another value's interval are applied without the
    # strict-inequality offset; the offset is recovered where it matters by
    # the loop-header refinement (see _refine_phis).
    if other.empty:
        return EMPTY
    if pred_op in ("lt", "le"):
        return Interval(None, other.hi) if other.hi is not None else TOP
    if pred_op in ("gt", "ge"):
        return Interval(other.lo, None) if other.lo is not None else TOP
    if pred_op == "eq":
        return Interval(other.lo, other.hi)
    return TOP


def _constraint_future_strict(pred_op: str, other: Interval) -> Interval:
    if other.empty:
        return EMPTY
    if pred_op == "lt" and other.hi is not None:
        return Interval(None, other.hi - 1)
    if pred_op == "gt" and other.lo is not None:
        return Interval(other.lo + 1, None)
    return _constraint_future(pred_op, other)


def to_essa(kernel: Kernel) -> ESSAKernel:
    """Insert sigma renamings for branch-constrained integer values.

    For each conditional branch whose condition is an integer comparison,
    every compared value that has uses dominated by an out-edge target gets
    a renamed version there carrying the implied constraint. Renamings with
    no dominated uses are not materialized, so a branch-free kernel comes
    back structurally unchanged.
    """
    assert not validate(kernel), "to_essa requires a valid kernel"
    types = kernel.value_types()
    defs = {}
    for b in kernel.blocks:
        for ins in b.instructions:
            if ins.dest is not None:
                defs[ins.dest] = ins
    preds = predecessors(kernel)
    dom = dominators(kernel)

    # (target block, sigma name, source, pred_op, other)
    planned: list[tuple[str, str, str, str, object]] = []
    rewrites: dict[str, dict[str, str]] = {}  # block -> {old: new} for body uses
    edge_rewrites: dict[tuple[str, str], dict[str, str]] = {}  # (pred, block) phi uses
    taken_names = set(types)

    for b in kernel.blocks:
        term = b.terminator
        if term.opcode != "branch" or not isinstance(term.operands[0], str):
            continue
        cond_def = defs.get(term.operands[0])
        if cond_def is None or cond_def.opcode != "cmp":
            continue
        if cond_def.type is None or cond_def.type.kind != "int":
            continue
        lhs, rhs = cond_def.operands
        for edge_index, target in enumerate(term.targets):
            if [p for p in preds[target]] != [b.label]:
                continue  # sigma lives on the edge; skip shared targets
            for source, other, mirrored in ((lhs, rhs, False), (rhs, lhs, True)):
                if not isinstance(source, str):
                    continue
                pred_op = cond_def.cmp_op
                if mirrored:
                    pred_op = _MIRROR[pred_op]
                if edge_index == 1:
                    pred_op = _NEGATE[pred_op]
                dominated = {l for l, ds in dom.items() if target in ds}
                used = _has_dominated_use(kernel, source, dominated)
                if not used:
                    continue
                name = f"{source}.{'t' if edge_index == 0 else 'f'}"
                while name in taken_names:
                    name += "_"
                taken_names.add(name)
                planned.append((target, name, source, pred_op, other))
                for l in dominated:
                    rewrites.setdefault(l, {})[source] = name
                for l in dominated:
                    for s in kernel.block(l).terminator.targets:
                        edge_rewrites.setdefault((l, s), {})[source] = name

    if not planned:
        return ESSAKernel(kernel, kernel, {})

    sigma_at: dict[str, list[tuple[str, str, str, object]]] = {}
    infos: dict[str, SigmaInfo] = {}
    for target, name, source, pred_op, other in planned:
        sigma_at.setdefault(target, []).append((name, source, pred_op, other))
        infos[name] = SigmaInfo(name, source, pred_op, other, target)

    new_blocks = []
    for b in kernel.blocks:
        instrs: list[Instruction] = []
        body_map = rewrites.get(b.label, {})
        pending = sigma_at.get(b.label, [])
        placed = False

        def emit_sigmas():
            for name, source, pred_op, other in pending:
                instrs.append(Instruction("sigma", name, types[source], (source,)))

        for ins in b.instructions:
            if ins.opcode != "phi" and not placed:
                emit_sigmas()
                placed = True
            if ins.opcode == "phi":
                ops = []
                for o, pl in zip(ins.operands, ins.phi_labels):
                    m = edge_rewrites.get((pl, b.label), {})
                    ops.append(m.get(o, o) if isinstance(o, str) else o)
                instrs.append(replace(ins, operands=tuple(ops)))
                continue
            ops = tuple(body_map.get(o, o) if isinstance(o, str) else o
                        for o in ins.operands)
            instrs.append(replace(ins, operands=ops))
        if not placed:
            emit_sigmas()
        new_blocks.append(BasicBlock(b.label, tuple(instrs)))

    new_kernel = Kernel(kernel.name, kernel.params, tuple(new_blocks))
    return ESSAKernel(new_kernel, kernel, infos)


def _has_dominated_use(kernel: Kernel, value: str, dominated: set[str]) -> bool:
    for b in kernel.blocks:
        for ins in b.instructions:
            if ins.opcode == "phi":
                for o, pl in zip(ins.operands, ins.phi_labels):
                    if o == value and pl in dominated:
                        return True
                continue
            if b.label in dominated and value in ins.value_operands():
                return True
    return False


def from_essa(essa: ESSAKernel) -> Kernel:
    """Drop sigma definitions and rename their uses back to the sources."""
    back = {s.name: s.source for s in essa.sigmas.values()}
    blocks = []
    for b in essa.kernel.blocks:
        instrs = []
        for ins in b.instructions:
            if ins.opcode == "sigma":
                continue
            ops = tuple(back.get(o, o) if isinstance(o, str) else o
                        for o in ins.operands)
            instrs.append(replace(ins, operands=ops))
        blocks.append(BasicBlock(b.label, tuple(instrs)))
    return Kernel(essa.kernel.name, essa.kernel.params, tuple(blocks))


# ---------------------------------------------------------------------------
# Solver

def _transfer(ins: Instruction, env, types) -> Interval:
    op = ins.opcode

    def get(o) -> Interval:
        if isinstance(o, str):
            return env.get(o, EMPTY)
        return const(int(o))

    if op == "const":
        return const(int(ins.operands[0]))
    if op == "load-param":
        return env.get(ins.operands[0], TOP)
    if op == "phi":
        out = EMPTY
        for o in ins.operands:
            out = hull(out, get(o))
        return out
    if op == "sigma":
        return get(ins.operands[0])  # constraint applied by the caller
    if op == "cmp":
        return Interval(0, 1)
    if op == "select":
        return hull(get(ins.operands[1]), get(ins.operands[2]))
    if op == "convert":
        src = ins.operands[0]
        if isinstance(src, str) and types.get(src) is not None \
                and types[src].kind == "int":
            iv = get(src)
            if iv.issubset(Interval(*type_value_range(ins.type))):
                return iv
        return TOP

    a = get(ins.operands[0]) if ins.operands else EMPTY
    b = get(ins.operands[1]) if len(ins.operands) > 1 else EMPTY
    if a.empty or b.empty:
        return EMPTY

    def arith(iv: Interval) -> Interval:
        # A result that may leave the type's value range can wrap anywhere
        # in it, so it is widened to the full (finite) type range.
        rng = Interval(*type_value_range(ins.type))
        return iv if iv.issubset(rng) else rng

    if op == "add":
        return arith(iv_add(a, b))
    if op == "sub":
        return arith(iv_sub(a, b))
    if op == "mul":
        return arith(iv_mul(a, b))
    if op == "min":
        return iv_min(a, b)
    if op == "max":
        return iv_max(a, b)
    if op == "div":
        if a.is_const and b.is_const:
            if b.lo == 0:
                return const(0)  # integer division by zero is defined as 0
            q = abs(a.lo) // abs(b.lo)
            if (a.lo < 0) != (b.lo < 0):
                q = -q
            return arith(const(q))
        return arith(TOP)
    if op == "shl":
        if b.is_const and 0 <= b.lo <= 31:
            return arith(iv_mul(a, const(1 << b.lo)))
        return arith(TOP)
    if op == "shr":
        if b.is_const and 0 <= b.lo <= 31 and a.lo is not None and a.hi is not None:
            if not ins.type.signed and a.lo < 0:
                return arith(TOP)
            return arith(Interval(a.lo >> b.lo, a.hi >> b.lo))
        return arith(TOP)
    if op in ("and", "or", "xor"):
        if a.is_const and b.is_const:
            x, y = a.lo, b.lo
            return arith(const(x & y if op == "and" else x | y if op == "or" else x ^ y))
        if op == "and":
            # masking with a non-negative constant bounds the result
            for m in (a, b):
                if m.is_const and m.lo >= 0:
                    return Interval(0, m.lo)
        return arith(TOP)
    return TOP


def solve_ranges(essa: ESSAKernel) -> dict[str, Interval]:
    """Fixpoint interval for every integer value of the e-SSA kernel.

    Soundness contract: any concrete execution assigns each value only
    numbers inside its interval. Unconstrained values come back as
    [-inf,+inf]; values that can never exist are the empty interval.
    """
    kernel = essa.kernel
    types = kernel.value_types()
    int_values = [v for v, t in types.items() if t.kind == "int"]
    env: dict[str, Interval] = {v: EMPTY for v in int_values}
    for p in kernel.params:
        if p.type.kind != "int":
            continue
        env[p.name] = (Interval(p.declared_range[0], p.declared_range[1])
                       if p.declared_range is not None else TOP)

    producers: dict[str, Instruction] = {}
    users: dict[str, list[str]] = {v: [] for v in int_values}
    order: dict[str, int] = {}
    for b in kernel.blocks:
        for ins in b.instructions:
            d = ins.dest
            if d is None or types[d].kind != "int":
                continue
            producers[d] = ins
            order[d] = len(order)
            for o in ins.value_operands():
                if o in users:
                    users[o].append(d)

    def constrain(v: str, iv: Interval, resolve_futures: bool) -> Interval:
        info = essa.sigmas.get(v)
        if info is None or producers[v].opcode != "sigma":
            return iv
        if isinstance(info.other, str):
            if resolve_futures:
                return intersect(iv, _constraint_future(info.pred_op,
                                                        env.get(info.other, TOP)))
            return iv
        return intersect(iv, _constraint_const(info.pred_op, int(info.other)))

    def eval_value(v: str, resolve_futures: bool) -> Interval:
        return constrain(v, _transfer(producers[v], env, types), resolve_futures)

    def run(resolve_futures, ascending, visit_cap):
        visits: dict[str, int] = {}
        heap = [(order[v], v) for v in producers]
        heapq.heapify(heap)
        pending = {v for v in producers}
        while heap:
            _, v = heapq.heappop(heap)
            pending.discard(v)
            n = visits.get(v, 0) + 1
            visits[v] = n
            if n > visit_cap and not ascending:
                continue
            old = env[v]
            new = eval_value(v, resolve_futures)
            if ascending:
                new = hull(old, new)
                if n > visit_cap and new != old and not old.empty:
                    # widen the moving bound(s) to infinity, then re-apply
                    # the sigma constraint so branch bounds survive widening
                    lo = old.lo if (old.lo is not None and new.lo == old.lo) else None
                    hi = old.hi if (old.hi is not None and new.hi == old.hi) else None
                    new = constrain(v, Interval(lo, hi), resolve_futures)
            else:
                new = intersect(old, new)
            if new != old:
                env[v] = new
                for u in users.get(v, []):
                    if u not in pending:
                        pending.add(u)
                        heapq.heappush(heap, (order[u], u))

    run(resolve_futures=False, ascending=True, visit_cap=WIDEN_VISITS)
    run(resolve_futures=True, ascending=False, visit_cap=NARROW_ROUNDS)
    _refine_phis(kernel, essa, env, types, producers)
    run(resolve_futures=True, ascending=False, visit_cap=NARROW_ROUNDS)
    return env


def _refine_phis(kernel, essa, env, types, producers):
    """One-deep re-evaluation of phi operands under strict edge constraints.

    The value arriving at a loop header through a back edge was computed on
    a path where the edge's branch constraints held for the exact SSA
    values they name, so re-evaluating the operand's defining instruction
    with sigma operands pinned to their strict constraint is sound and
    usually recovers the off-by-one a counter's exit test implies.
    """
    def strict_env(o) -> Interval:
        iv = env.get(o, TOP)
        info = essa.sigmas.get(o)
        if info is not None:
            if isinstance(info.other, str):
                c = _constraint_future_strict(info.pred_op, env.get(info.other, TOP))
            else:
                c = _constraint_const(info.pred_op, int(info.other))
            iv = intersect(env.get(info.source, TOP), c)
            iv = intersect(iv, env.get(o, TOP))
        return iv

    for b in kernel.blocks:
        for ins in b.instructions:
            if ins.opcode != "phi" or types[ins.dest].kind != "int":
                continue
            out = EMPTY
            for o in ins.operands:
                if not isinstance(o, str):
                    out = hull(out, const(int(o)))
                    continue
                contrib = env.get(o, TOP)
                d = producers.get(o)
                if d is not None and d.opcode != "phi":
                    scoped = {v: strict_env(v) for v in d.value_operands()}
                    patched = dict(env)
                    patched.update(scoped)
                    re_eval = _transfer(d, patched, types)
                    if d.opcode == "sigma":
                        re_eval = strict_env(o)
                    contrib = intersect(contrib, re_eval)
                out = hull(out, contrib)
            refined = intersect(env[ins.dest], out)
            if not refined.empty:
                env[ins.dest] = refined


# ---------------------------------------------------------------------------
# Merging and width annotation

def phi_webs(kernel: Kernel, sigmas: dict[str, SigmaInfo] | None = None) -> dict[str, set[str]]:
    """Partition values into webs connected by phi and sigma nodes.

    Each web corresponds to one pre-SSA variable; the web's name is the
    longest common identifier prefix of its members (stripped of trailing
    digits), falling back to the first member.
    """
    parent: dict[str, str] = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    types = kernel.value_types()
    for v in types:
        find(v)
    for b in kernel.blocks:
        for ins in b.instructions:
            if ins.opcode == "phi":
                for o in ins.operands:
                    if isinstance(o, str):
                        union(ins.dest, o)
            elif ins.opcode == "sigma":
                union(ins.operands[0], ins.dest)
    if sigmas:
        for s in sigmas.values():
            union(s.source, s.name)

    webs: dict[str, list[str]] = {}
    for v in types:
        webs.setdefault(find(v), []).append(v)

    named: dict[str, set[str]] = {}
    for members in webs.values():
        members.sort()
        name = _web_name(members)
        while name in named:
            name += "_"
        named[name] = set(members)
    return named


def _web_name(members: list[str]) -> str:
    prefix = os.path.commonprefix(members)
    prefix = prefix.rstrip("0123456789").rstrip("._")
    return prefix if prefix else members[0]


def merge_ranges(ranges: dict[str, Interval],
                 groups: dict[str, set[str]]) -> dict[str, Interval]:
    """Hull of each group's intervals; empty members contribute nothing."""
    merged = {}
    for name, members in groups.items():
        out = EMPTY
        for v in sorted(members):
            if v in ranges:
                out = hull(out, ranges[v])
        merged[name] = out
    return merged


@dataclass(frozen=True)
class WidthAnnotation:
    lo: int | None
    hi: int | None
    bits: int
    signed: bool

    def as_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "bits": self.bits,
                "signed": self.signed}


def _annotated_bits(iv: Interval, signed: bool) -> int:
    bits = bitwidth(iv, signed)
    return 32 if bits > FULL_WIDTH_CUTOFF else bits


@dataclass(frozen=True)
class RangeAnalysis:
    """Everything downstream consumers need from the integer analysis."""
    essa: ESSAKernel
    ranges: dict[str, Interval]
    groups: dict[str, set[str]]
    merged: dict[str, Interval]
    per_value: dict[str, WidthAnnotation]    # original kernel values only
    per_variable: dict[str, WidthAnnotation]

    def export_widths(self) -> dict[str, dict]:
        return {v: w.as_dict() for v, w in sorted(self.per_value.items())}


def analyze_kernel(kernel: Kernel) -> RangeAnalysis:
    """Full pipeline: e-SSA, solve, merge per variable, annotate widths."""
    essa = to_essa(kernel)
    ranges = solve_ranges(essa)
    groups = essa.groups()
    merged = merge_ranges(ranges, groups)
    types = essa.kernel.value_types()
    original = set(kernel.value_types())

    per_value = {}
    for v, iv in ranges.items():
        if v not in original or iv.empty:
            continue
        signed = types[v].signed
        per_value[v] = WidthAnnotation(iv.lo, iv.hi, _annotated_bits(iv, signed),
                                       signed)
    per_variable = {}
    for name, iv in merged.items():
        members = groups[name]
        if iv.empty or not any(m in ranges for m in members):
            continue
        signed = any(types[m].signed for m in members if m in ranges)
        per_variable[name] = WidthAnnotation(iv.lo, iv.hi,
                                             _annotated_bits(iv, signed), signed)
    return RangeAnalysis(essa, ranges, groups, merged, per_value, per_variable)
