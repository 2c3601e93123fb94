"""Textual kernel format: parser and printer.

Grammar (one instruction per line, comments start with '#'):

    kernel <name>(<id>: <type> [in [lo, hi]], ...) {
    block <label>:
      <id> = <opcode> <type> <operands>
      <id> = cmp <op> <type> <a>, <b>
      <id> = phi <type> [<v>, <block>], ...
      store <type> <value>, <index>
      jump <label>
      branch <cond>, <then>, <else>
      return <v>, ...
    }

Types are i32, u32, f32. parse/format_kernel round-trip: formatting a parsed
kernel and re-parsing it yields a structurally identical Kernel.
"""

from __future__ import annotations

import re

from .ir import (CMP_OPS, OPCODE_ARITY, TYPES_BY_NAME, BasicBlock, Instruction,
                 Kernel, Param, validate)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


_IDENT = r"[A-Za-z_][A-Za-z0-9_.]*"
_ident_re = re.compile(_IDENT + r"$")
_int_re = re.compile(r"[+-]?\d+$")
_float_re = re.compile(r"[+-]?(\d+\.\d*([eE][+-]?\d+)?|\d+[eE][+-]?\d+|\.\d+([eE][+-]?\d+)?)$")
_header_re = re.compile(r"kernel\s+(" + _IDENT + r")\s*\((.*)\)\s*\{$")
_block_re = re.compile(r"block\s+(" + _IDENT + r")\s*:$")
_param_re = re.compile(
    r"(" + _IDENT + r")\s*:\s*(i32|u32|f32)"
    r"(?:\s+in\s+\[\s*(-?\d+)\s*,\s*(-?\d+)\s*\])?$")


def _strip(line: str) -> str:
    if "#" in line:
        line = line[:line.index("#")]
    return line.strip()


def _split_operands(text: str, lineno: int) -> list[str]:
    """Split on commas that are not inside phi brackets."""
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced ']'", lineno)
        if ch == "," and depth == 0:
            parts.append(cur.strip())
            cur = ""
        else:
            cur += ch
    if depth != 0:
        raise ParseError("unbalanced '['", lineno)
    if cur.strip():
        parts.append(cur.strip())
    return parts


def _parse_operand(tok: str, ty, lineno: int):
    if _ident_re.match(tok):
        return tok
    if _int_re.match(tok):
        v = int(tok)
        if ty is not None and ty.kind == "float":
            return float(v)
        return v
    if _float_re.match(tok):
        return float(tok)
    raise ParseError(f"bad operand {tok!r}", lineno)


def parse(text: str) -> Kernel:
    """Parse and validate kernel source.

    Raises ParseError for syntax problems and for any validation violation
    (SSA, dominance, typing), so a returned Kernel is always valid.
    """
    kernel = parse_unchecked(text)
    problems = validate(kernel)
    if problems:
        raise ParseError(problems[0], 0)
    return kernel


def parse_unchecked(text: str) -> Kernel:
    lines = text.splitlines()
    sig = [(i + 1, _strip(l)) for i, l in enumerate(lines)]
    sig = [(n, l) for n, l in sig if l]
    if not sig:
        raise ParseError("empty input", 1)

    pos = 0
    lineno, line = sig[pos]
    m = _header_re.match(line)
    if not m:
        raise ParseError("expected 'kernel <name>(...) {'", lineno)
    name, params_text = m.group(1), m.group(2).strip()
    params = []
    if params_text:
        for ptext in _split_operands(params_text, lineno):
            pm = _param_re.match(ptext)
            if not pm:
                raise ParseError(f"bad parameter {ptext!r}", lineno)
            rng = None
            if pm.group(3) is not None:
                rng = (int(pm.group(3)), int(pm.group(4)))
                if rng[0] > rng[1]:
                    raise ParseError(f"empty declared range on {pm.group(1)}", lineno)
            params.append(Param(pm.group(1), TYPES_BY_NAME[pm.group(2)], rng))
    pos += 1

    blocks: list[BasicBlock] = []
    cur_label: str | None = None
    cur_instrs: list[Instruction] = []
    closed = False

    def flush(lineno):
        nonlocal cur_label, cur_instrs
        if cur_label is not None:
            if not cur_instrs:
                raise ParseError(f"block {cur_label} is empty", lineno)
            blocks.append(BasicBlock(cur_label, tuple(cur_instrs)))
        cur_label, cur_instrs = None, []

    while pos < len(sig):
        lineno, line = sig[pos]
        pos += 1
        if line == "}":
            flush(lineno)
            closed = True
            if pos != len(sig):
                raise ParseError("text after closing '}'", sig[pos][0])
            break
        bm = _block_re.match(line)
        if bm:
            flush(lineno)
            cur_label = bm.group(1)
            continue
        if cur_label is None:
            raise ParseError("instruction outside a block", lineno)
        cur_instrs.append(_parse_instruction(line, lineno))
    if not closed:
        raise ParseError("missing closing '}'", sig[-1][0])
    if not blocks:
        raise ParseError("kernel has no blocks", sig[-1][0])
    return Kernel(name, tuple(params), tuple(blocks))


def _parse_instruction(line: str, lineno: int) -> Instruction:
    if "=" in line and not line.startswith(("store", "jump", "branch", "return")):
        dest, rhs = line.split("=", 1)
        dest = dest.strip()
        if not _ident_re.match(dest):
            raise ParseError(f"bad destination {dest!r}", lineno)
        return _parse_rhs(dest, rhs.strip(), lineno)

    toks = line.split(None, 1)
    op = toks[0]
    rest = toks[1].strip() if len(toks) > 1 else ""
    if op == "jump":
        if not _ident_re.match(rest):
            raise ParseError("jump expects a block label", lineno)
        return Instruction("jump", None, None, (), targets=(rest,))
    if op == "branch":
        parts = _split_operands(rest, lineno)
        if len(parts) != 3:
            raise ParseError("branch expects 'cond, then, else'", lineno)
        cond = _parse_operand(parts[0], None, lineno)
        return Instruction("branch", None, None, (cond,), targets=(parts[1], parts[2]))
    if op == "return":
        ops = tuple(_parse_operand(p, None, lineno)
                    for p in _split_operands(rest, lineno)) if rest else ()
        return Instruction("return", None, None, ops)
    if op == "store":
        toks = rest.split(None, 1)
        if len(toks) != 2 or toks[0] not in TYPES_BY_NAME:
            raise ParseError("store expects 'store <type> <value>, <index>'", lineno)
        ty = TYPES_BY_NAME[toks[0]]
        parts = _split_operands(toks[1], lineno)
        if len(parts) != 2:
            raise ParseError("store expects a value and an index", lineno)
        val = _parse_operand(parts[0], ty, lineno)
        idx = _parse_operand(parts[1], None, lineno)
        return Instruction("store", None, ty, (val, idx))
    raise ParseError(f"cannot parse instruction {line!r}", lineno)


def _parse_rhs(dest: str, rhs: str, lineno: int) -> Instruction:
    toks = rhs.split(None, 1)
    opcode = toks[0]
    rest = toks[1].strip() if len(toks) > 1 else ""
    if opcode == "sigma":
        raise ParseError("sigma is reserved for e-SSA form", lineno)
    if opcode not in OPCODE_ARITY or opcode in ("store", "jump", "branch", "return"):
        raise ParseError(f"unknown opcode {opcode!r}", lineno)

    cmp_op = None
    if opcode == "cmp":
        toks = rest.split(None, 1)
        if not toks or toks[0] not in CMP_OPS:
            raise ParseError("cmp expects a comparison (eq/ne/lt/le/gt/ge)", lineno)
        cmp_op = toks[0]
        rest = toks[1].strip() if len(toks) > 1 else ""

    toks = rest.split(None, 1)
    if not toks or toks[0] not in TYPES_BY_NAME:
        raise ParseError(f"{opcode} expects a type (i32/u32/f32)", lineno)
    ty = TYPES_BY_NAME[toks[0]]
    rest = toks[1].strip() if len(toks) > 1 else ""

    if opcode == "phi":
        ops, labels = [], []
        for part in _split_operands(rest, lineno):
            pm = re.match(r"\[\s*(\S+)\s*,\s*(" + _IDENT + r")\s*\]$", part)
            if not pm:
                raise ParseError(f"bad phi operand {part!r}", lineno)
            ops.append(_parse_operand(pm.group(1), ty, lineno))
            labels.append(pm.group(2))
        if not ops:
            raise ParseError("phi needs at least one operand", lineno)
        return Instruction("phi", dest, ty, tuple(ops), phi_labels=tuple(labels))

    parts = _split_operands(rest, lineno) if rest else []
    operand_ty = ty if opcode != "convert" else None
    ops = tuple(_parse_operand(p, operand_ty, lineno) for p in parts)
    return Instruction(opcode, dest, ty, ops, cmp_op=cmp_op)


# ---------------------------------------------------------------------------
# Printing

def _fmt_operand(o) -> str:
    if isinstance(o, str):
        return o
    if isinstance(o, float):
        return repr(o)
    return str(o)


def format_instruction(ins: Instruction) -> str:
    if ins.opcode == "jump":
        return f"jump {ins.targets[0]}"
    if ins.opcode == "branch":
        return f"branch {_fmt_operand(ins.operands[0])}, {ins.targets[0]}, {ins.targets[1]}"
    if ins.opcode == "return":
        ops = ", ".join(_fmt_operand(o) for o in ins.operands)
        return f"return {ops}".rstrip()
    if ins.opcode == "store":
        return (f"store {ins.type.name} {_fmt_operand(ins.operands[0])}, "
                f"{_fmt_operand(ins.operands[1])}")
    if ins.opcode == "phi":
        ops = ", ".join(f"[{_fmt_operand(o)}, {l}]"
                        for o, l in zip(ins.operands, ins.phi_labels))
        return f"{ins.dest} = phi {ins.type.name} {ops}"
    if ins.opcode == "cmp":
        ops = ", ".join(_fmt_operand(o) for o in ins.operands)
        return f"{ins.dest} = cmp {ins.cmp_op} {ins.type.name} {ops}"
    ops = ", ".join(_fmt_operand(o) for o in ins.operands)
    text = f"{ins.dest} = {ins.opcode} {ins.type.name}"
    return f"{text} {ops}" if ops else text


def format_kernel(kernel: Kernel) -> str:
    parts = []
    for p in kernel.params:
        s = f"{p.name}: {p.type.name}"
        if p.declared_range is not None:
            s += f" in [{p.declared_range[0]}, {p.declared_range[1]}]"
        parts.append(s)
    lines = [f"kernel {kernel.name}({', '.join(parts)}) {{"]
    for b in kernel.blocks:
        lines.append(f"block {b.label}:")
        for ins in b.instructions:
            lines.append(f"  {format_instruction(ins)}")
    lines.append("}")
    return "\n".join(lines) + "\n"
