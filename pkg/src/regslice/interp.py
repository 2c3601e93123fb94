"""Reference interpreter with reduced-precision storage semantics.

Float instructions always compute at 32-bit precision on widened operands;
the *result* of every float-typed definition (parameters included) is then
passed through its assigned storage format before any use, modeling a value
that lives in the packed register file. Integer arithmetic wraps to 32 bits
two's complement. Integer division by zero yields 0; shift amounts outside
[0, 31] shift everything out (arithmetic right shifts keep the sign).

Kernel outputs are the element-indexed store slots in index order followed
by the values named by the executed return.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ir import Kernel
from .minifloat import F32_FORMAT, FloatFormat, storage_round

MAX_STORE_SLOTS = 1 << 16

_f32 = np.float32


class InterpError(Exception):
    pass


class StepLimitExceeded(InterpError):
    pass


@dataclass
class ExecResult:
    outputs: list
    returned: tuple
    stored: dict
    steps: int
    instruction_count: int  # executed non-control instructions, phi included


def _wrap_int(v: int, signed: bool) -> int:
    v &= 0xFFFFFFFF
    if signed and v >= 1 << 31:
        v -= 1 << 32
    return v


def _trunc_div(a: int, b: int) -> int:
    if b == 0:
        return 0
    q = abs(a) // abs(b)
    return -q if (a < 0) != (b < 0) else q


def _shift(op: str, a: int, amt: int, signed: bool) -> int:
    if not 0 <= amt <= 31:
        if op == "shr" and signed and a < 0:
            return -1
        return 0
    if op == "shl":
        return _wrap_int(a << amt, signed)
    if signed:
        return a >> amt  # arithmetic
    return (a & 0xFFFFFFFF) >> amt


def _to_int(x: float, signed: bool) -> int:
    """float -> int conversion: truncate toward zero, saturate, NaN -> 0."""
    if np.isnan(x):
        return 0
    lo, hi = (-(1 << 31), (1 << 31) - 1) if signed else (0, (1 << 32) - 1)
    if np.isinf(x):
        return hi if x > 0 else lo
    v = int(float(x))
    return max(lo, min(hi, v))


def _special(op: str, x):
    if op == "sin":
        return np.sin(x)
    if op == "cos":
        return np.cos(x)
    if op == "log":
        return np.log(x)
    if op == "exp":
        return np.exp(x)
    # reciprocal square root, computed in double and rounded once
    return _f32(1.0 / np.sqrt(np.float64(x)))


def coerce_input(value, ty):
    if ty.kind == "float":
        return _f32(value)
    if isinstance(value, float) and not value.is_integer():
        raise InterpError(f"integer parameter bound to non-integer {value!r}")
    return _wrap_int(int(value), ty.signed)


def interpret(kernel: Kernel, inputs: dict, assignment: dict | None = None,
              *, max_steps: int = 1_000_000, rounding: str = "round",
              trace_sink=None, observer=None) -> ExecResult:
    """Execute the kernel on one input binding.

    `assignment` maps float value ids to FloatFormat; absent entries (or
    assignment=None) mean full 32-bit storage. `trace_sink`, when given,
    receives (instruction, dest_value, chosen_phi_operand) for every
    executed non-control instruction; the simulator's trace builder uses
    it. `observer` receives (value_id, concrete_value) for every
    definition, parameters included. Sigma definitions (e-SSA form)
    execute as identity copies.
    """
    types = kernel.value_types()
    assignment = assignment or {}

    def fmt_of(v) -> FloatFormat:
        return assignment.get(v, F32_FORMAT)

    def store_rounded(v: str, x):
        f = fmt_of(v)
        if f.total_bits == 32:
            return _f32(x)
        return _f32(storage_round(float(x), f, rounding))

    env: dict[str, object] = {}
    for p in kernel.params:
        if p.name not in inputs:
            raise InterpError(f"missing input binding for parameter {p.name}")
        v = coerce_input(inputs[p.name], p.type)
        if p.type.kind == "float":
            v = store_rounded(p.name, v)
        env[p.name] = v
        if observer is not None:
            observer(p.name, v)
    extra = set(inputs) - {p.name for p in kernel.params}
    if extra:
        raise InterpError(f"unknown input binding {sorted(extra)[0]!r}")

    blocks = {b.label: b for b in kernel.blocks}
    stored: dict[int, object] = {}
    steps = 0
    icount = 0
    returned: tuple = ()

    def val(o, ty):
        if isinstance(o, str):
            return env[o]
        if ty is not None and ty.kind == "float":
            return _f32(o)
        return o

    with np.errstate(all="ignore"):
        label = kernel.entry.label
        prev = None
        done = False
        while not done:
            block = blocks[label]
            # phis read their operands simultaneously on block entry
            phi_updates = {}
            for ins in block.instructions:
                if ins.opcode != "phi":
                    break
                steps += 1
                icount += 1
                if steps > max_steps:
                    raise StepLimitExceeded(f"exceeded {max_steps} steps")
                for o, pl in zip(ins.operands, ins.phi_labels):
                    if pl == prev:
                        x = val(o, ins.type)
                        if ins.type.kind == "float":
                            x = store_rounded(ins.dest, x)
                        phi_updates[ins.dest] = x
                        if trace_sink is not None:
                            trace_sink(ins, ins.dest, o)
                        if observer is not None:
                            observer(ins.dest, x)
                        break
                else:
                    raise InterpError(f"phi {ins.dest} has no operand for "
                                      f"predecessor {prev}")
            env.update(phi_updates)

            for ins in block.instructions:
                if ins.opcode == "phi":
                    continue
                steps += 1
                if steps > max_steps:
                    raise StepLimitExceeded(f"exceeded {max_steps} steps")
                op = ins.opcode
                if op == "jump":
                    prev, label = label, ins.targets[0]
                    break
                if op == "branch":
                    cond = val(ins.operands[0], None)
                    prev, label = label, ins.targets[0 if cond != 0 else 1]
                    break
                if op == "return":
                    returned = tuple(val(o, None) for o in ins.operands)
                    done = True
                    break

                icount += 1
                if trace_sink is not None:
                    trace_sink(ins, ins.dest, None)
                if op == "store":
                    idx = val(ins.operands[1], None)
                    if not 0 <= int(idx) < MAX_STORE_SLOTS:
                        raise InterpError(f"store index {idx} out of range")
                    stored[int(idx)] = val(ins.operands[0], ins.type)
                    continue

                ty = ins.type
                x = _eval(op, ins, ty, val, types)
                if ty is not None and ty.kind == "float" and op != "cmp":
                    x = store_rounded(ins.dest, x)
                env[ins.dest] = x
                if observer is not None:
                    observer(ins.dest, x)

    outputs = [stored[i] for i in sorted(stored)] + list(returned)
    return ExecResult(outputs, returned, stored, steps, icount)


def _eval(op, ins, ty, val, types):
    if op == "const":
        o = ins.operands[0]
        return _f32(o) if ty.kind == "float" else _wrap_int(int(o), ty.signed)
    if op == "sigma":
        return val(ins.operands[0], ty)
    if op == "load-param":
        return val(ins.operands[0], ty)
    if op == "convert":
        src = ins.operands[0]
        sty = types.get(src) if isinstance(src, str) else None
        x = val(src, sty)
        if ty.kind == "float":
            if sty is not None and sty.kind == "float":
                return _f32(x)
            return _f32(int(x)) if isinstance(x, int) else _f32(x)
        if sty is not None and sty.kind == "float":
            return _to_int(x, ty.signed)
        return _wrap_int(int(x), ty.signed)  # i32 <-> u32 reinterpretation
    if op == "cmp":
        a = val(ins.operands[0], ins.type)
        b = val(ins.operands[1], ins.type)
        r = {"eq": a == b, "ne": a != b, "lt": a < b,
             "le": a <= b, "gt": a > b, "ge": a >= b}[ins.cmp_op]
        return 1 if r else 0
    if op == "select":
        c = val(ins.operands[0], None)
        return val(ins.operands[1 if c != 0 else 2], ty)

    if op in ("sin", "cos", "log", "exp", "rsqrt"):
        return _f32(_special(op, val(ins.operands[0], ty)))

    a = val(ins.operands[0], ty)
    b = val(ins.operands[1], ty)
    if ty.kind == "float":
        if op == "add":
            return _f32(a + b)
        if op == "sub":
            return _f32(a - b)
        if op == "mul":
            return _f32(a * b)
        if op == "div":
            return _f32(a / b)
        if op == "min":
            return _f32(min(a, b)) if not (np.isnan(a) or np.isnan(b)) else _f32(np.nan)
        if op == "max":
            return _f32(max(a, b)) if not (np.isnan(a) or np.isnan(b)) else _f32(np.nan)
        raise InterpError(f"float {op} is not defined")
    # integer path
    if op == "add":
        return _wrap_int(a + b, ty.signed)
    if op == "sub":
        return _wrap_int(a - b, ty.signed)
    if op == "mul":
        return _wrap_int(a * b, ty.signed)
    if op == "div":
        return _wrap_int(_trunc_div(a, b), ty.signed)
    if op == "min":
        return min(a, b)
    if op == "max":
        return max(a, b)
    if op == "and":
        return _wrap_int((a & 0xFFFFFFFF) & (b & 0xFFFFFFFF), ty.signed)
    if op == "or":
        return _wrap_int((a & 0xFFFFFFFF) | (b & 0xFFFFFFFF), ty.signed)
    if op == "xor":
        return _wrap_int((a & 0xFFFFFFFF) ^ (b & 0xFFFFFFFF), ty.signed)
    if op in ("shl", "shr"):
        return _shift(op, a, b, ty.signed)
    raise InterpError(f"cannot evaluate opcode {op}")
