"""SSA kernel IR: scalar types, instructions, basic blocks, and validation.

Kernels are immutable once constructed and safe to share between threads.
All control flow is explicit (blocks terminated by jump/branch/return);
loops are built from back edges and phi nodes rather than structured sugar.
"""

from __future__ import annotations

from dataclasses import dataclass


# ---------------------------------------------------------------------------
# Scalar types

@dataclass(frozen=True)
class ScalarType:
    kind: str     # "int" or "float"
    signed: bool  # meaningful for ints only

    @property
    def name(self) -> str:
        if self.kind == "float":
            return "f32"
        return "i32" if self.signed else "u32"

    def __repr__(self) -> str:
        return self.name


I32 = ScalarType("int", True)
U32 = ScalarType("int", False)
F32 = ScalarType("float", True)

TYPES_BY_NAME = {"i32": I32, "u32": U32, "f32": F32}

INT_MIN = -(1 << 31)
INT_MAX = (1 << 31) - 1
UINT_MAX = (1 << 32) - 1


def type_value_range(ty: ScalarType) -> tuple[int, int]:
    if ty.signed:
        return (INT_MIN, INT_MAX)
    return (0, UINT_MAX)


# ---------------------------------------------------------------------------
# Opcodes

CMP_OPS = ("eq", "ne", "lt", "le", "gt", "ge")
SPECIAL_FNS = ("sin", "cos", "log", "exp", "rsqrt")

BINARY_OPS = ("add", "sub", "mul", "div", "min", "max")
BITWISE_OPS = ("and", "or", "xor", "shl", "shr")
TERMINATORS = ("jump", "branch", "return")

# opcode -> (operand arity, has dest). phi/return have variable arity (None).
OPCODE_ARITY: dict[str, tuple[int | None, bool]] = {}
for _op in BINARY_OPS + BITWISE_OPS:
    OPCODE_ARITY[_op] = (2, True)
for _op in SPECIAL_FNS:
    OPCODE_ARITY[_op] = (1, True)
OPCODE_ARITY.update({
    "cmp": (2, True),
    "select": (3, True),
    "phi": (None, True),
    "convert": (1, True),
    "load-param": (1, True),
    "const": (1, True),
    "sigma": (1, True),   # produced by e-SSA conversion, not by the parser
    "store": (2, False),
    "return": (None, False),
    "branch": (1, False),
    "jump": (0, False),
})

INT_ONLY_OPS = set(BITWISE_OPS)
SFU_OPS = set(SPECIAL_FNS)


# ---------------------------------------------------------------------------
# Instructions and blocks

# Operands are value ids (str) or immediates (int for integer types,
# float for f32).


@dataclass(frozen=True)
class Instruction:
    opcode: str
    dest: str | None
    type: ScalarType | None
    operands: tuple
    cmp_op: str | None = None          # cmp only
    phi_labels: tuple[str, ...] = ()   # phi only, parallel to operands
    targets: tuple[str, ...] = ()      # jump/branch only

    @property
    def is_terminator(self) -> bool:
        return self.opcode in TERMINATORS

    def value_operands(self) -> tuple[str, ...]:
        return tuple(o for o in self.operands if isinstance(o, str))


@dataclass(frozen=True)
class BasicBlock:
    label: str
    instructions: tuple[Instruction, ...]

    @property
    def terminator(self) -> Instruction:
        return self.instructions[-1]

    def phis(self) -> tuple[Instruction, ...]:
        return tuple(i for i in self.instructions if i.opcode == "phi")


@dataclass(frozen=True)
class Param:
    name: str
    type: ScalarType
    declared_range: tuple[int, int] | None = None


@dataclass(frozen=True)
class Kernel:
    name: str
    params: tuple[Param, ...]
    blocks: tuple[BasicBlock, ...]

    def block(self, label: str) -> BasicBlock:
        for b in self.blocks:
            if b.label == label:
                return b
        raise KeyError(label)

    @property
    def entry(self) -> BasicBlock:
        return self.blocks[0]

    @property
    def outputs(self) -> tuple[str, ...]:
        """Value ids named by return instructions, in first-seen order."""
        out: list[str] = []
        for b in self.blocks:
            t = b.terminator
            if t.opcode == "return":
                for o in t.operands:
                    if isinstance(o, str) and o not in out:
                        out.append(o)
        return tuple(out)

    def value_types(self) -> dict[str, ScalarType]:
        types = {p.name: p.type for p in self.params}
        for b in self.blocks:
            for ins in b.instructions:
                if ins.dest is not None:
                    types[ins.dest] = result_type(ins)
        return types

    def defs(self) -> dict[str, tuple[str, int]]:
        """Map value id -> (block label, instruction index) of its definition."""
        d = {}
        for b in self.blocks:
            for i, ins in enumerate(b.instructions):
                if ins.dest is not None:
                    d[ins.dest] = (b.label, i)
        return d


def result_type(ins: Instruction) -> ScalarType:
    # cmp produces a 0/1 flag stored as u32; everywhere else the type token
    # on the instruction names the result type.
    if ins.opcode == "cmp":
        return U32
    return ins.type


# ---------------------------------------------------------------------------
# CFG helpers

def successors(kernel: Kernel) -> dict[str, tuple[str, ...]]:
    return {b.label: b.terminator.targets for b in kernel.blocks}


def predecessors(kernel: Kernel) -> dict[str, tuple[str, ...]]:
    preds: dict[str, list[str]] = {b.label: [] for b in kernel.blocks}
    for b in kernel.blocks:
        for t in b.terminator.targets:
            if t in preds:
                preds[t].append(b.label)
    return {k: tuple(v) for k, v in preds.items()}


def reachable_blocks(kernel: Kernel) -> set[str]:
    succ = successors(kernel)
    seen = {kernel.entry.label}
    work = [kernel.entry.label]
    while work:
        for t in succ.get(work.pop(), ()):
            if t in succ and t not in seen:
                seen.add(t)
                work.append(t)
    return seen


def dominators(kernel: Kernel) -> dict[str, set[str]]:
    """Classic iterative dominator sets over reachable blocks."""
    reach = reachable_blocks(kernel)
    preds = predecessors(kernel)
    labels = [b.label for b in kernel.blocks if b.label in reach]
    entry = kernel.entry.label
    dom = {l: set(labels) for l in labels}
    dom[entry] = {entry}
    changed = True
    while changed:
        changed = False
        for l in labels:
            if l == entry:
                continue
            ps = [p for p in preds[l] if p in reach]
            new = set.intersection(*(dom[p] for p in ps)) if ps else set()
            new.add(l)
            if new != dom[l]:
                dom[l] = new
                changed = True
    return dom


# ---------------------------------------------------------------------------
# Validation

def validate(kernel: Kernel) -> list[str]:
    """Check all kernel invariants; returns a list of violations (empty = valid).

    The result is deterministic and independent of block declaration order:
    violations are reported sorted.
    """
    errs: list[str] = []
    labels = [b.label for b in kernel.blocks]
    if len(set(labels)) != len(labels):
        errs.append("duplicate block label")
    if not kernel.blocks:
        return ["kernel has no blocks"]

    types: dict[str, ScalarType] = {}
    for p in kernel.params:
        if p.name in types:
            errs.append(f"duplicate parameter {p.name}")
        types[p.name] = p.type

    # single definition
    for b in kernel.blocks:
        for ins in b.instructions:
            if ins.dest is not None:
                if ins.dest in types:
                    errs.append(f"SSA violation: {ins.dest} defined more than once")
                else:
                    types[ins.dest] = result_type(ins)

    label_set = set(labels)
    preds = predecessors(kernel)
    reach = reachable_blocks(kernel)
    for b in kernel.blocks:
        if b.label not in reach:
            errs.append(f"unreachable block {b.label}")

    for b in kernel.blocks:
        if not b.instructions:
            errs.append(f"block {b.label} is empty")
            continue
        if not b.terminator.is_terminator:
            errs.append(f"block {b.label} does not end in a terminator")
        for i, ins in enumerate(b.instructions):
            if ins.is_terminator and i != len(b.instructions) - 1:
                errs.append(f"block {b.label} has a terminator before its end")
            if ins.opcode == "phi" and i > 0 and b.instructions[i - 1].opcode != "phi":
                errs.append(f"block {b.label}: phi after non-phi instruction")
        for t in b.terminator.targets:
            if t not in label_set:
                errs.append(f"block {b.label} branches to unknown block {t}")

    errs.extend(_check_instructions(kernel, types, preds))
    errs.extend(_check_dominance(kernel, types))

    # all return sites must agree on arity
    arities = set()
    for b in kernel.blocks:
        if b.terminator.opcode == "return":
            arities.add(len(b.terminator.operands))
    if len(arities) > 1:
        errs.append("return sites disagree on the number of returned values")
    return sorted(errs)


def _operand_type(op, types) -> ScalarType | None:
    if isinstance(op, str):
        return types.get(op)
    return None


def _check_instructions(kernel, types, preds) -> list[str]:
    errs = []
    param_names = {p.name for p in kernel.params}
    for b in kernel.blocks:
        for ins in b.instructions:
            arity, has_dest = OPCODE_ARITY.get(ins.opcode, (None, None))
            if has_dest is None:
                errs.append(f"{b.label}: unknown opcode {ins.opcode}")
                continue
            if has_dest and ins.dest is None:
                errs.append(f"{b.label}: {ins.opcode} needs a destination")
            if not has_dest and ins.dest is not None:
                errs.append(f"{b.label}: {ins.opcode} cannot define a value")
            if ins.opcode == "phi":
                if len(ins.operands) != len(ins.phi_labels):
                    errs.append(f"{b.label}: phi {ins.dest} labels/operand mismatch")
                want = preds.get(b.label, ())
                if len(ins.operands) != len(want):
                    errs.append(
                        f"{b.label}: phi {ins.dest} has {len(ins.operands)} operands "
                        f"for {len(want)} predecessors")
                elif sorted(ins.phi_labels) != sorted(want):
                    errs.append(f"{b.label}: phi {ins.dest} labels do not match predecessors")
            elif arity is not None and len(ins.operands) != arity:
                errs.append(f"{b.label}: {ins.opcode} expects {arity} operands, "
                            f"got {len(ins.operands)}")
            errs.extend(_check_types(b.label, ins, types, param_names))
    return errs


def _check_types(label, ins, types, param_names) -> list[str]:
    errs = []
    op = ins.opcode

    def vt(o):
        return _operand_type(o, types)

    def want(o, ty, what):
        if isinstance(o, str):
            got = vt(o)
            if got is None:
                errs.append(f"{label}: use of undefined value {o}")
            elif ty is not None and got != ty:
                errs.append(f"{label}: {what} of {op} has type {got.name}, "
                            f"expected {ty.name}")
        elif ty is not None and ty.kind == "int" and isinstance(o, float):
            errs.append(f"{label}: float immediate in {ty.name} position")

    if op in BINARY_OPS:
        for i, o in enumerate(ins.operands):
            want(o, ins.type, f"operand {i}")
    elif op in INT_ONLY_OPS:
        if ins.type is not None and ins.type.kind != "int":
            errs.append(f"{label}: {op} requires an integer type")
        for i, o in enumerate(ins.operands):
            want(o, ins.type, f"operand {i}")
    elif op in SFU_OPS:
        if ins.type != F32:
            errs.append(f"{label}: {op} requires f32")
        for o in ins.operands:
            want(o, F32, "operand")
    elif op == "cmp":
        if ins.cmp_op not in CMP_OPS:
            errs.append(f"{label}: unknown comparison {ins.cmp_op}")
        for i, o in enumerate(ins.operands):
            want(o, ins.type, f"operand {i}")
    elif op == "select":
        if len(ins.operands) == 3:
            want(ins.operands[0], U32, "condition")
            want(ins.operands[1], ins.type, "operand 1")
            want(ins.operands[2], ins.type, "operand 2")
    elif op == "convert":
        if ins.operands:
            want(ins.operands[0], None, "operand")
    elif op == "load-param":
        if ins.operands:
            o = ins.operands[0]
            if not isinstance(o, str) or o not in param_names:
                errs.append(f"{label}: load-param expects a parameter name")
            elif types[o] != ins.type:
                errs.append(f"{label}: load-param type differs from parameter {o}")
    elif op == "const":
        if ins.operands and isinstance(ins.operands[0], str):
            errs.append(f"{label}: const expects an immediate")
        elif ins.operands and ins.type is not None and ins.type.kind == "int":
            v = ins.operands[0]
            lo, hi = type_value_range(ins.type)
            if not isinstance(v, int) or not lo <= v <= hi:
                errs.append(f"{label}: const {v!r} out of range for {ins.type.name}")
    elif op == "store":
        if len(ins.operands) == 2:
            want(ins.operands[0], ins.type, "value")
            idx = ins.operands[1]
            if isinstance(idx, str):
                ty = vt(idx)
                if ty is None:
                    errs.append(f"{label}: use of undefined value {idx}")
                elif ty.kind != "int":
                    errs.append(f"{label}: store index must be an integer")
            elif not isinstance(idx, int) or idx < 0:
                errs.append(f"{label}: store index must be a non-negative integer")
    elif op == "branch":
        if ins.operands:
            o = ins.operands[0]
            if isinstance(o, str):
                ty = vt(o)
                if ty is None:
                    errs.append(f"{label}: use of undefined value {o}")
                elif ty.kind != "int":
                    errs.append(f"{label}: branch condition must be an integer")
            else:
                errs.append(f"{label}: branch condition must be a value")
        if len(ins.targets) != 2:
            errs.append(f"{label}: branch needs two targets")
    elif op == "jump":
        if len(ins.targets) != 1:
            errs.append(f"{label}: jump needs one target")
    elif op in ("return", "phi", "sigma"):
        for o in ins.operands:
            want(o, ins.type if op != "return" else None, "operand")
    return errs


def _check_dominance(kernel, types) -> list[str]:
    """Every use must be dominated by its definition (phi operands are
    checked against the end of the corresponding predecessor block)."""
    errs = []
    defs = kernel.defs()
    param_names = {p.name for p in kernel.params}
    reach = reachable_blocks(kernel)
    dom = dominators(kernel)
    order = {b.label: i for i, b in enumerate(kernel.blocks)}

    def dominates(defsite, use_block, use_index):
        dblock, dindex = defsite
        if dblock == use_block:
            return dindex < use_index
        return dblock in dom.get(use_block, set())

    for b in kernel.blocks:
        if b.label not in reach:
            continue
        for i, ins in enumerate(b.instructions):
            if ins.opcode == "phi":
                for o, pred in zip(ins.operands, ins.phi_labels):
                    if not isinstance(o, str) or o in param_names:
                        continue
                    if o not in defs:
                        continue  # undefined-use reported by type checking
                    if pred not in reach:
                        continue
                    # use point: end of the predecessor block
                    plen = len(kernel.block(pred).instructions) if pred in order else 0
                    if not dominates(defs[o], pred, plen):
                        errs.append(f"{b.label}: phi operand {o} does not dominate "
                                    f"edge from {pred}")
                continue
            for o in ins.operands:
                if not isinstance(o, str) or o in param_names:
                    continue
                if o not in defs:
                    continue
                if not dominates(defs[o], b.label, i):
                    errs.append(f"{b.label}: use of {o} not dominated by its definition")
    return errs
