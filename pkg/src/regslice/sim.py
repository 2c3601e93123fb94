"""Cycle-approximate model of the operand collector and register file.

Baseline machine: two warp schedulers issue up to two instructions per
cycle (at most one per warp) into free collector units; a scoreboard
blocks issue while a source or destination register has a write in
flight (no forwarding). Source operands queue at an arbitrator that
grants at most one access per register bank and delivers at most one
operand per collector unit per cycle. When all operands are collected the
instruction dispatches to its execution unit class (2x SPU, 1x SFU,
1x LD/ST, each pipelined) and after the class latency its destination
takes a writeback-bus slot (three per cycle) charged one cycle.

Packed mode adds the proposed structures: every source operand first
reads its entry from the banked source indirection table (one pipeline
stage, one access per bank and collector unit per cycle), operands split
across two physical registers take two register fetches that OR-merge in
the collector unit, narrow floats take one of six value-converter slots
before the instruction may dispatch, and each writeback is charged a flat
`writeback_delay_cycles` (destination indirection + truncation + possible
bank conflicts, three cycles by default).

Arbitration everywhere is oldest-request-first with ties broken by lowest
warp id, then program order; identical inputs always produce identical
results.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .allocator import ARCH_REGISTERS, AllocationResult, IndirectionEntry, OperandInfo
from .interp import interpret
from .ir import Kernel


class SimError(Exception):
    pass


@dataclass(frozen=True)
class SimConfig:
    banks: int = 16
    entries_per_bank: int = 64
    bank_width_bits: int = 1024
    collector_units: int = 16
    warp_schedulers: int = 2
    max_warps: int = 48
    thread_registers: int = 32768
    warp_size: int = 32
    indirection_banks: int = 16
    conversion_throughput: int = 6
    writeback_width: int = 3
    writeback_delay_cycles: int = 3
    shared_memory_bytes: int = 49152
    latency_spu: int = 4
    latency_sfu: int = 8
    latency_ldst: int = 100

    def __post_init__(self):
        assert self.banks * self.entries_per_bank * self.bank_width_bits \
            == self.thread_registers * 32
        for f in ("banks", "collector_units", "warp_schedulers", "max_warps",
                  "conversion_throughput", "writeback_width", "warp_size",
                  "indirection_banks"):
            assert getattr(self, f) > 0, f

    def latency(self, opclass: str) -> int:
        return {"spu": self.latency_spu, "sfu": self.latency_sfu,
                "ldst": self.latency_ldst}[opclass]


@dataclass(frozen=True)
class TraceEvent:
    warp: int
    opclass: str
    srcs: tuple[int, ...]
    dst: int | None

    def __post_init__(self):
        assert self.opclass in ("spu", "sfu", "ldst")
        assert len(self.srcs) <= 3
        for r in self.srcs + ((self.dst,) if self.dst is not None else ()):
            assert 0 <= r < ARCH_REGISTERS, f"register id {r} out of range"


@dataclass
class SimResult:
    cycles: int
    retired: int
    ipc: float
    stalls: dict[str, int]
    mode: str
    occupancy_warps: int

    def as_dict(self) -> dict:
        return {"cycles": self.cycles, "retired": self.retired,
                "ipc": self.ipc, "mode": self.mode,
                "occupancy_warps": self.occupancy_warps,
                "stalls": dict(sorted(self.stalls.items()))}


# ---------------------------------------------------------------------------
# Trace serialization

def format_trace(trace: list[TraceEvent]) -> str:
    lines = []
    for e in trace:
        src = ",".join(str(r) for r in e.srcs)
        dst = str(e.dst) if e.dst is not None else "-"
        lines.append(f"warp={e.warp} op={e.opclass} src={src} dst={dst}")
    return "\n".join(lines) + ("\n" if lines else "")


_trace_re = re.compile(r"warp=(\d+)\s+op=(spu|sfu|ldst)\s+src=([\d,]*)\s+dst=(\d+|-)$")


def parse_trace(text: str) -> list[TraceEvent]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _trace_re.match(line)
        if not m:
            raise SimError(f"trace line {lineno}: cannot parse {line!r}")
        srcs = tuple(int(t) for t in m.group(3).split(",") if t)
        dst = None if m.group(4) == "-" else int(m.group(4))
        out.append(TraceEvent(int(m.group(1)), m.group(2), srcs, dst))
    return out


# ---------------------------------------------------------------------------
# Trace construction from a kernel execution

_SFU = {"sin", "cos", "log", "exp", "rsqrt"}
_LDST = {"load-param", "store"}


def build_trace(kernel: Kernel, alloc: AllocationResult, warps: int,
                inputs: dict | None = None, *, max_steps: int = 200_000,
                assignment: dict | None = None) -> list[TraceEvent]:
    """Flatten one bounded kernel execution into per-warp event streams.

    The kernel is executed by the reference interpreter; every non-control
    instruction (phi moves included, with the dynamically chosen source)
    becomes one event. All warps replay the same stream; events interleave
    round-robin. Kernels whose execution exceeds `max_steps` raise SimError
    (an unbounded loop needs a bound).
    """
    if warps < 1:
        raise SimError("need at least one warp")
    stream: list[tuple[str, tuple[int, ...], int | None]] = []

    def sink(ins, dest, phi_src):
        if ins.opcode == "phi":
            srcs = [phi_src] if isinstance(phi_src, str) else []
        else:
            srcs = [o for o in ins.operands if isinstance(o, str)]
        src_regs = tuple(alloc.arch_regs[s] for s in srcs)[:3]
        dst = alloc.arch_regs[dest] if dest is not None else None
        opclass = ("sfu" if ins.opcode in _SFU
                   else "ldst" if ins.opcode in _LDST else "spu")
        stream.append((opclass, src_regs, dst))

    try:
        interpret(kernel, inputs or {}, assignment, max_steps=max_steps,
                  trace_sink=sink)
    except Exception as exc:  # noqa: BLE001 - surface with the sim's error type
        raise SimError(f"trace extraction failed: {exc}") from exc

    trace = []
    for i in range(len(stream)):
        for w in range(warps):
            opclass, srcs, dst = stream[i]
            trace.append(TraceEvent(w, opclass, srcs, dst))
    return trace


# ---------------------------------------------------------------------------
# The simulator proper

_ST_NEED_IND = 0
_ST_FETCH = 1
_ST_NEED_CONV = 2
_ST_READY = 3


@dataclass
class _Operand:
    arch: int
    state: int
    parts: list[int] = field(default_factory=list)  # pending bank ids
    needs_conversion: bool = False


@dataclass
class _CU:
    cu_id: int
    warp: int
    seq: int
    opclass: str
    dst: int | None
    operands: list[_Operand]
    issue_cycle: int
    min_dispatch: int  # the packed pipeline stage applies to every instruction

    def ready(self) -> bool:
        return all(o.state == _ST_READY for o in self.operands)


def simulate(trace: list[TraceEvent], alloc: AllocationResult | None,
             occupancy: int | None = None, cfg: SimConfig | None = None,
             mode: str = "baseline",
             writeback_delay: int | None = None) -> SimResult:
    """Run the trace at the given occupancy and report cycles/IPC/stalls.

    `alloc` supplies the packed placement (entries plus per-operand float
    formats); baseline mode treats every architectural register as its own
    32-bit physical register and ignores the placement. `occupancy` is the
    number of active warps and must match the warps present in the trace.
    """
    cfg = cfg or SimConfig()
    if mode not in ("baseline", "packed"):
        raise SimError(f"unknown mode {mode!r}")
    packed = mode == "packed"
    wb_delay = cfg.writeback_delay_cycles if packed else 1
    if writeback_delay is not None:
        if not packed:
            raise SimError("writeback_delay is a packed-mode parameter")
        wb_delay = writeback_delay

    warp_ids = sorted({e.warp for e in trace})
    n_warps = len(warp_ids)
    if occupancy is None:
        occupancy = n_warps
    if occupancy != n_warps:
        raise SimError(f"occupancy {occupancy} does not match {n_warps} warps "
                       f"in the trace")
    if occupancy > cfg.max_warps:
        raise SimError(f"occupancy {occupancy} exceeds max_warps {cfg.max_warps}")
    if not trace:
        return SimResult(0, 0, 0.0, _zero_stalls(), mode, 0)

    by_arch: dict[int, OperandInfo] = {}
    if alloc is not None:
        for info in alloc.operands.values():
            by_arch[info.arch_reg] = info

    def op_info(arch: int) -> OperandInfo | None:
        if not packed:
            return None
        info = by_arch.get(arch)
        if info is None:
            raise SimError(f"trace references architectural register {arch} "
                           f"with no indirection entry")
        return info

    queues: dict[int, list[TraceEvent]] = {w: [] for w in warp_ids}
    for e in trace:
        queues[e.warp].append(e)
    heads = {w: 0 for w in warp_ids}

    total = len(trace)
    retired = 0
    last_activity = 0
    stalls = _zero_stalls()

    # in-flight state
    free_cus = list(range(cfg.collector_units))
    cus: dict[int, _CU] = {}
    pending_writes: dict[int, dict[int, int | None]] = {w: {} for w in warp_ids}
    ind_requests: list[tuple[int, int, int, int, int]] = []  # key..., cu, op_idx
    reg_requests: list[tuple[int, int, int, int, int, int]] = []
    conv_queue: list[tuple[int, int, int, int]] = []
    exec_done: list[tuple[int, _CU]] = []      # (end cycle, cu snapshot)
    wb_ready: list[tuple[int, int, int, _CU]] = []  # (ready cycle, warp, seq, cu)
    seq_counter = 0

    cycle = 0
    max_cycles = 10_000_000
    while retired < total:
        if cycle > max_cycles:
            raise SimError("simulation did not converge (internal error)")

        # 1. writeback starts: up to writeback_width per cycle
        wb_ready.sort()
        started = 0
        rest = []
        for entry in wb_ready:
            ready_cycle, warp, seq, cu = entry
            if ready_cycle > cycle or started >= cfg.writeback_width:
                rest.append(entry)
                continue
            started += 1
            complete = cycle + wb_delay - 1
            pending_writes[warp][cu.dst] = complete
            retired += 1
            last_activity = max(last_activity, complete)
        wb_ready = rest

        # 2. execution completions
        still = []
        for end, cu in exec_done:
            if end != cycle:
                still.append((end, cu))
                continue
            if cu.dst is None:
                retired += 1
                last_activity = max(last_activity, cycle)
            else:
                wb_ready.append((cycle + 1, cu.warp, cu.seq, cu))
        exec_done = still

        # 3. dispatch ready CUs to execution units
        unit_slots = {"spu": 2, "sfu": 1, "ldst": 1}
        ready = sorted((c for c in cus.values()
                        if c.ready() and cycle >= c.min_dispatch),
                       key=lambda c: (c.issue_cycle, c.warp, c.seq))
        for cu in ready:
            if unit_slots[cu.opclass] == 0:
                continue
            unit_slots[cu.opclass] -= 1
            exec_done.append((cycle + cfg.latency(cu.opclass) - 1, cu))
            del cus[cu.cu_id]
            free_cus.append(cu.cu_id)
        free_cus.sort()

        # 4. value converter: up to conversion_throughput operands per cycle
        if packed and conv_queue:
            conv_queue.sort()
            grant = conv_queue[:cfg.conversion_throughput]
            stalls["conversion"] += len(conv_queue) - len(grant)
            for _, _, cu_id, op_idx in grant:
                if cu_id in cus:
                    cus[cu_id].operands[op_idx].state = _ST_READY
            conv_queue = conv_queue[cfg.conversion_throughput:]

        # 5. register bank grants
        reg_requests.sort()
        banks_busy: set[int] = set()
        cu_delivered: set[int] = set()
        remaining = []
        for req in reg_requests:
            req_cycle, warp, seq, op_idx, cu_id, bank = req
            if req_cycle >= cycle:
                remaining.append(req)
                continue
            if bank in banks_busy or cu_id in cu_delivered:
                stalls["bank_conflict"] += 1
                remaining.append(req)
                continue
            banks_busy.add(bank)
            cu_delivered.add(cu_id)
            cu = cus[cu_id]
            op = cu.operands[op_idx]
            op.parts.remove(bank)
            if not op.parts:
                if op.needs_conversion:
                    op.state = _ST_NEED_CONV
                    conv_queue.append((cycle, warp, cu_id, op_idx))
                else:
                    op.state = _ST_READY
        reg_requests = remaining

        # 6. source indirection table grants (packed only)
        if packed:
            ind_requests.sort()
            ind_busy: set[int] = set()
            cu_ind: set[int] = set()
            remaining = []
            for req in ind_requests:
                req_cycle, warp, seq, op_idx, cu_id = req
                if req_cycle >= cycle:
                    remaining.append(req)
                    continue
                cu = cus.get(cu_id)
                op = cu.operands[op_idx]
                bank = op.arch % cfg.indirection_banks
                if bank in ind_busy or cu_id in cu_ind:
                    stalls["indirection_conflict"] += 1
                    remaining.append(req)
                    continue
                ind_busy.add(bank)
                cu_ind.add(cu_id)
                info = op_info(op.arch)
                op.state = _ST_FETCH
                op.parts = [reg % cfg.banks for reg, _ in info.entry.parts()]
                for part_bank in op.parts:
                    reg_requests.append((cycle, warp, seq, op_idx, cu_id, part_bank))
            ind_requests = remaining

        # 7. issue: up to warp_schedulers instructions, one per warp
        issued = 0
        for w in warp_ids:
            if issued >= cfg.warp_schedulers:
                break
            if heads[w] >= len(queues[w]):
                continue
            e = queues[w][heads[w]]
            regs = set(e.srcs) | ({e.dst} if e.dst is not None else set())
            blocked = False
            for r in regs:
                done = pending_writes[w].get(r, -1)
                if r in pending_writes[w] and (done is None or done >= cycle):
                    blocked = True
                    break
            if blocked:
                stalls["scoreboard"] += 1
                continue
            if not free_cus:
                stalls["cu_full"] += 1
                continue
            cu_id = free_cus.pop(0)
            seq = seq_counter
            seq_counter += 1
            operands = []
            for arch in dict.fromkeys(e.srcs):  # dedup, keep order
                if packed:
                    info = op_info(arch)
                    needs_conv = (info.float_format is not None
                                  and info.float_format.total_bits < 32)
                    op = _Operand(arch, _ST_NEED_IND, [], needs_conv)
                    operands.append(op)
                else:
                    op = _Operand(arch, _ST_FETCH, [arch % cfg.banks], False)
                    operands.append(op)
            if packed and e.dst is not None:
                op_info(e.dst)  # destination must be allocated too
            cu = _CU(cu_id, w, seq, e.opclass, e.dst, operands, cycle,
                     cycle + (2 if packed else 1))
            cus[cu_id] = cu
            for op_idx, op in enumerate(operands):
                if packed:
                    ind_requests.append((cycle, w, seq, op_idx, cu_id))
                else:
                    reg_requests.append((cycle, w, seq, op_idx, cu_id,
                                         op.parts[0]))
            if e.dst is not None:
                pending_writes[w][e.dst] = None  # completion not yet known
            heads[w] += 1
            issued += 1

        cycle += 1

    cycles = last_activity + 1
    return SimResult(cycles, retired, retired / cycles if cycles else 0.0,
                     stalls, mode, occupancy)


def _zero_stalls() -> dict[str, int]:
    return {"bank_conflict": 0, "indirection_conflict": 0, "conversion": 0,
            "scoreboard": 0, "cu_full": 0}


def identity_allocation(kernel: Kernel, live=None) -> AllocationResult:
    """All-32-bit placement with architectural register i in physical i."""
    from .liveness import compute_live_ranges

    live = live or compute_live_ranges(kernel)
    order = [p.name for p in kernel.params]
    for b in kernel.blocks:
        for ins in b.instructions:
            if ins.dest is not None:
                order.append(ins.dest)
    arch_regs = {v: i for i, v in enumerate(order)}
    entries = {}
    operands = {}
    for v, i in arch_regs.items():
        e = IndirectionEntry(i, 0xFF)
        entries[v] = e
        operands[v] = OperandInfo(v, i, 32, False, None, e)
    baseline = live.max_live
    return AllocationResult(entries, operands, arch_regs, baseline, baseline,
                            len(arch_regs), 0, {})


def identity_allocation_for_trace(trace: list[TraceEvent]) -> AllocationResult:
    """All-32-bit identity placement covering every register a trace names.

    Handy for hand-written traces that never came from a kernel.
    """
    regs = sorted({r for e in trace
                   for r in e.srcs + ((e.dst,) if e.dst is not None else ())})
    entries, operands, arch = {}, {}, {}
    for r in regs:
        v = f"r{r}"
        e = IndirectionEntry(r, 0xFF)
        entries[v] = e
        arch[v] = r
        operands[v] = OperandInfo(v, r, 32, False, None, e)
    n = max(1, len(regs))
    return AllocationResult(entries, operands, arch, n, n, len(regs), 0, {})
