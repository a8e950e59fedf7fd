"""Event-driven execution of cascade programs on a finite truncation.

Machine ``n`` runs with quantum ``2**-n``. Each instruction slot lasts one
quantum and its reads and writes take effect at the end of the slot. A
single time-ordered queue holds the next slot of every running machine;
``step`` pops and applies exactly one slot.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from enum import Enum
from itertools import count

from .lang import (Assign, CellRef, CopyProgramNext, Idle, Program,
                   instruction_cost, is_loop_dialect, validate)
from .timebase import ZERO, DyadicTime

__all__ = [
    "TruncationMode", "Status", "Micro", "MachineState", "CascadeState",
    "TraceEvent", "RunResult", "CascadeError", "DialectError", "ValidationError",
    "DataRace", "PhantomAccess", "CopyConflict", "CellWidthError", "DONE",
    "spawn_root", "step", "run", "predicted_schedule", "observed_schedule",
    "trace_lines", "write_trace",
]


class TruncationMode(Enum):
    SKIP = "skip"
    PHANTOM_ZERO = "phantom-zero"


class Status(Enum):
    NOT_SPAWNED = "NotSpawned"
    RUNNING = "Running"
    IDLE = "Idle"
    HALTED = "Halted"


class Micro(Enum):
    WHOLE = "Whole"
    EVAL = "Eval"
    STORE = "Store"


class CascadeError(Exception):
    pass


class DialectError(CascadeError):
    pass


class ValidationError(CascadeError):
    def __init__(self, report):
        self.report = report
        msgs = "; ".join(m for _, m in report.diagnostics)
        super().__init__(f"program failed validation: {msgs}")


class DataRace(CascadeError):
    def __init__(self, cell: int, time: DyadicTime, event: TraceEvent):
        self.cell = cell
        self.time = time
        self.event = event
        self.result: RunResult | None = None
        super().__init__(f"data race on cell {cell} at t={time}")


class PhantomAccess(CascadeError):
    pass


class CopyConflict(CascadeError):
    pass


class CellWidthError(CascadeError):
    pass


DONE = None


@dataclass
class MachineState:
    index: int
    quantum: DyadicTime
    value_cell: int = 0
    program: Program | None = None
    pc: int = 0
    micro: int = 0
    status: Status = Status.NOT_SPAWNED
    slot_start: DyadicTime | None = None
    sampled: int | None = None
    writes: int = 0


@dataclass(frozen=True)
class TraceEvent:
    machine: int
    instruction_id: int
    micro: Micro
    start: DyadicTime
    effect: DyadicTime
    reads: tuple = ()
    writes: tuple = ()

    def to_record(self) -> dict:
        return {
            "machine": self.machine,
            "instruction_id": self.instruction_id,
            "micro": self.micro.value,
            "start": self.start.canonical(),
            "effect": self.effect.canonical(),
            "reads": [list(r) for r in self.reads],
            "writes": [list(w) for w in self.writes],
        }

    def to_line(self) -> str:
        return json.dumps(self.to_record(), separators=(", ", ": "))


@dataclass
class CascadeState:
    machines: dict
    truncation: int
    mode: TruncationMode
    now: DyadicTime = ZERO
    pending: list = field(default_factory=list)
    diagnostics: bool = False
    race_detected: bool = False
    _seq: count = field(default_factory=count, repr=False)
    _access_time: DyadicTime | None = field(default=None, repr=False)
    _access: dict = field(default_factory=dict, repr=False)

    def schedule(self, m: MachineState, start: DyadicTime) -> None:
        """Queue machine ``m``'s current instruction starting at ``start``."""
        body = m.program.body
        while m.pc < len(body) and isinstance(body[m.pc], Idle) and body[m.pc].m == 0:
            m.pc += 1
        if m.pc >= len(body):
            m.status = Status.HALTED
            m.slot_start = None
            return
        m.status = Status.IDLE if isinstance(body[m.pc], Idle) else Status.RUNNING
        m.slot_start = start
        effect = start + m.quantum
        heapq.heappush(self.pending, (effect, -m.index, next(self._seq), m.index))


@dataclass
class RunResult:
    trace: list
    final_values: dict
    completion_time: DyadicTime
    race_detected: bool
    truncation: int = 0
    mode: TruncationMode = TruncationMode.SKIP

    def value(self, n: int = 1) -> int:
        return self.final_values[n]


def spawn_root(p: Program, n: int, mode: TruncationMode = TruncationMode.SKIP,
               diagnostics: bool = False) -> CascadeState:
    if n < 1:
        raise ValueError("truncation N must be >= 1")
    if is_loop_dialect(p):
        raise DialectError(f"program {p.name} uses REPEAT; cascade runs need the cascade dialect")
    report = validate(p)
    if not report.ok:
        raise ValidationError(report)
    machines = {i: MachineState(i, DyadicTime.power_of_half(i)) for i in range(1, n + 1)}
    s = CascadeState(machines, n, TruncationMode(mode), diagnostics=diagnostics)
    root = machines[1]
    root.program = p
    s.schedule(root, ZERO)
    return s


def _not(x: int, where: str) -> int:
    if x not in (0, 1):
        raise CellWidthError(f"NOT of byte {x} at {where}; only 0/1 are defined")
    return 1 - x


def _cell_index(m: MachineState, ref: CellRef) -> int:
    return m.index + 1 if ref.is_next else m.index


def _touches_next(ins: Assign) -> bool:
    op = ins.expr.operand
    return ins.dest.is_next or (isinstance(op, CellRef) and op.is_next)


def _record_access(s: CascadeState, ev: TraceEvent, seq: int) -> None:
    if s._access_time != ev.effect:
        s._access_time = ev.effect
        s._access = {}
    accesses = [(c, False) for c, _ in ev.reads] + [(c, True) for c, _ in ev.writes]
    for cell, is_write in accesses:
        for other_seq, other_write in s._access.get(cell, ()):
            if other_seq != seq and (is_write or other_write):
                s.race_detected = True
                raise DataRace(cell, ev.effect, ev)
    for cell, is_write in accesses:
        s._access.setdefault(cell, []).append((seq, is_write))


def step(s: CascadeState) -> TraceEvent | None:
    """Apply the next slot in effect-time order; ``DONE`` (None) when idle."""
    if not s.pending:
        return DONE
    effect, _, seq, idx = heapq.heappop(s.pending)
    assert effect >= s.now
    s.now = effect
    m = s.machines[idx]
    start = m.slot_start
    ins = m.program.body[m.pc]
    ins_id = m.pc + 1
    last = idx == s.truncation
    reads: list = []
    writes: list = []
    micro = Micro.WHOLE

    def read(ref: CellRef) -> int | None:
        cell = _cell_index(m, ref)
        if cell > s.truncation:
            if s.diagnostics:
                raise PhantomAccess(f"machine {idx} reads VALUE_NEXT past M_{s.truncation}")
            if s.mode is TruncationMode.SKIP:
                return None
            reads.append((cell, 0))
            return 0
        v = s.machines[cell].value_cell
        reads.append((cell, v))
        return v

    def write(ref: CellRef, v: int) -> None:
        cell = _cell_index(m, ref)
        if cell > s.truncation:
            if s.diagnostics:
                raise PhantomAccess(f"machine {idx} writes VALUE_NEXT past M_{s.truncation}")
            return
        s.machines[cell].value_cell = v
        s.machines[cell].writes += 1
        writes.append((cell, v))

    advance = True
    if isinstance(ins, CopyProgramNext):
        if not last:
            nxt = s.machines[idx + 1]
            if nxt.status is not Status.NOT_SPAWNED:
                raise CopyConflict(f"machine {idx} copies into M_{idx + 1}, which already holds a program")
            nxt.program = m.program
            nxt.pc = 0
            s.schedule(nxt, effect)
        elif s.diagnostics:
            raise PhantomAccess(f"machine {idx} copies past M_{s.truncation}")
    elif isinstance(ins, Idle):
        advance = m.micro + 1 >= ins.m
    elif isinstance(ins, Assign):
        skip = last and s.mode is TruncationMode.SKIP and _touches_next(ins) and not s.diagnostics
        two = instruction_cost(ins) == 2
        if two:
            micro = Micro.EVAL if m.micro == 0 else Micro.STORE
            advance = m.micro == 1
        if skip:
            pass
        elif micro is Micro.EVAL:
            m.sampled = read(ins.expr.operand)
        elif micro is Micro.STORE:
            if m.sampled is not None:
                write(ins.dest, _not(m.sampled, f"M_{idx} instruction {ins_id}"))
            m.sampled = None
        else:
            op = ins.expr.operand
            v = read(op) if isinstance(op, CellRef) else op
            if v is not None:
                write(ins.dest, _not(v, f"M_{idx} instruction {ins_id}") if ins.expr.negated else v)

    ev = TraceEvent(idx, ins_id, micro, start, effect, tuple(reads), tuple(writes))
    _record_access(s, ev, seq)

    if advance:
        m.pc += 1
        m.micro = 0
    else:
        m.micro += 1
    s.schedule(m, effect)
    return ev


def run(p: Program, n: int, mode: TruncationMode = TruncationMode.SKIP,
        diagnostics: bool = False, raise_on_race: bool = True) -> RunResult:
    """Run ``p`` on M_1..M_n to completion.

    On a data race the simulation halts. With ``raise_on_race`` the
    :class:`DataRace` is raised carrying the partial result; otherwise the
    partial result is returned with ``race_detected`` set.
    """
    s = spawn_root(p, n, mode, diagnostics)
    trace = []
    try:
        while (ev := step(s)) is not DONE:
            trace.append(ev)
    except DataRace as exc:
        trace.append(exc.event)
        exc.result = _result(s, trace)
        if raise_on_race:
            raise
        return exc.result
    return _result(s, trace)


def _result(s: CascadeState, trace: list) -> RunResult:
    completion = max((e.effect for e in trace), default=ZERO)
    values = {i: m.value_cell for i, m in s.machines.items()}
    return RunResult(trace, values, completion, s.race_detected, s.truncation, s.mode)


def predicted_schedule(n: int) -> tuple:
    """Closed-form start times (t_n1, t_n2, t_n3) and exit time t_n4 on M_n.

    t_n1 = 1 - 2^(1-n), t_n2 = 1 - 2^-n, t_n3 = 1 + 2^-n,
    t_n4 = 1 + 2^-n + 2^(1-n). Built from numerators so no subtraction is
    needed: 1 - 2^(1-n) = (2^(n-1) - 1) / 2^(n-1).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    t1 = DyadicTime((1 << (n - 1)) - 1, n - 1)
    t2 = DyadicTime((1 << n) - 1, n)
    t3 = DyadicTime((1 << n) + 1, n)
    t4 = DyadicTime((1 << n) + 3, n)
    return t1, t2, t3, t4


def observed_schedule(trace: list, n: int) -> tuple:
    """Per-instruction first start times on machine ``n``, then its exit time."""
    starts: dict = {}
    exit_time = None
    for ev in trace:
        if ev.machine != n:
            continue
        starts.setdefault(ev.instruction_id, ev.start)
        exit_time = ev.effect if exit_time is None else max(exit_time, ev.effect)
    return tuple(starts[k] for k in sorted(starts)) + (exit_time,)


def trace_lines(trace: list) -> list[str]:
    return [ev.to_line() for ev in trace]


def write_trace(trace: list, fh) -> None:
    for line in trace_lines(trace):
        fh.write(line + "\n")
