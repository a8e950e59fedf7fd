"""Limit behaviour of supertasks from finite evidence.

Two kinds of evidence are produced here: the parity sequence N -> VALUE_1
of a cascade program over truncations M_1..M_Nmax, and the step-by-step
lamp values of a loop program on a single Zeno-clocked machine. Both are
judged by the same tail classifier.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .cascade import DialectError, TruncationMode, ValidationError, run
from .lang import (Assign, CellRef, Idle, Program, RepeatForever,
                   is_loop_dialect, validate)
from .timebase import DyadicTime

__all__ = [
    "ParitySequence", "VerdictKind", "SupertaskVerdict", "SequenceTooShort",
    "ZenoStep", "ZenoTrace", "FreenessReport", "sweep", "classify",
    "classify_values", "run_zeno", "classify_zeno", "freeness",
    "zeno_freeness", "write_sweep_csv", "MIN_LENGTH",
]

MIN_LENGTH = 4


class SequenceTooShort(ValueError):
    pass


@dataclass
class ParitySequence:
    program_name: str
    cell: str
    values: list
    mode: TruncationMode = TruncationMode.SKIP

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n: int) -> int:
        """1-based: ``seq[N]`` is VALUE_1 on M_N."""
        if n < 1:
            raise IndexError(n)
        return self.values[n - 1]


class VerdictKind(Enum):
    CONVERGES = "Converges"
    PARADOX_UNDEFINED = "ParadoxUndefined"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class SupertaskVerdict:
    kind: VerdictKind
    value: int | None = None
    witness: str = ""
    evidence: int = 0

    def __str__(self):
        if self.kind is VerdictKind.CONVERGES:
            return f"Converges({self.value})"
        return self.kind.value


def _tail_start(values: Sequence, pattern) -> int | None:
    """Smallest discarded prefix (at most len//2) after which ``pattern`` holds."""
    n = len(values)
    min_tail = max(3, n - n // 2)
    for k in range(n // 2 + 1):
        tail = values[k:]
        if len(tail) < min_tail:
            break
        if pattern(tail):
            return k
    return None


def _constant(tail) -> bool:
    return all(x == tail[0] for x in tail)


def _alternating(tail) -> bool:
    return tail[0] != tail[1] and all(tail[i] == tail[i % 2] for i in range(len(tail)))


def classify_values(values: Sequence[int], label: str = "N") -> SupertaskVerdict:
    """Classify a 1-indexed evidence sequence by its tail.

    Up to ``len // 2`` leading entries may be dropped as a transient. A
    constant tail converges; an exact period-2 tail is undefined in the
    limit; anything else is unknown. The verdict is only as good as the
    ``len(values)`` entries it saw, which it records as ``evidence``.
    """
    values = list(values)
    n = len(values)
    if n < MIN_LENGTH:
        raise SequenceTooShort(f"need at least {MIN_LENGTH} values, got {n}")
    k = _tail_start(values, _constant)
    if k is not None:
        return SupertaskVerdict(
            VerdictKind.CONVERGES, values[-1],
            f"constant {values[-1]} for {label}={k + 1}..{n} "
            f"({k} prefix dropped; evidence {label}<={n})", n)
    k = _tail_start(values, _alternating)
    if k is not None:
        return SupertaskVerdict(
            VerdictKind.PARADOX_UNDEFINED, None,
            f"period-2 alternation {values[k]},{values[k + 1]} for {label}={k + 1}..{n} "
            f"({k} prefix dropped; evidence {label}<={n})", n)
    return SupertaskVerdict(VerdictKind.UNKNOWN, None,
                            f"no constant or period-2 tail (evidence {label}<={n})", n)


def classify(seq: ParitySequence | Sequence[int]) -> SupertaskVerdict:
    values = seq.values if isinstance(seq, ParitySequence) else seq
    return classify_values(values, "N")


def sweep(p: Program, n_max: int, mode: TruncationMode = TruncationMode.SKIP) -> ParitySequence:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    values = [run(p, n, mode).final_values[1] for n in range(1, n_max + 1)]
    return ParitySequence(p.name, "VALUE_1", values, TruncationMode(mode))


def write_sweep_csv(seq: ParitySequence, fh) -> None:
    """Columns N, VALUE_1, and the verdict on the prefix 1..N."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["N", "VALUE_1", "verdict"])
    for n in range(1, len(seq) + 1):
        prefix = seq.values[:n]
        verdict = str(classify_values(prefix)) if n >= MIN_LENGTH else "insufficient"
        w.writerow([n, seq.values[n - 1], verdict])


# -- single-machine Zeno clock -------------------------------------------------

@dataclass(frozen=True)
class ZenoStep:
    k: int
    time: DyadicTime
    value: int
    wrote: bool


@dataclass
class ZenoTrace:
    program_name: str
    cell: str
    steps: list
    limit_time: DyadicTime = field(default_factory=lambda: DyadicTime(1, 0))

    @property
    def values(self) -> list:
        return [s.value for s in self.steps]

    @property
    def write_count(self) -> int:
        return sum(s.wrote for s in self.steps)


def zeno_time(k: int) -> DyadicTime:
    """Completion time 1 - 2^-k of the k-th operation (0 for k = 0)."""
    return DyadicTime((1 << k) - 1, k)


def _operations(p: Program):
    """Yield the machine's operations in order, forever if the loop is reached."""
    def expand(ins):
        if isinstance(ins, Idle):
            return [None] * ins.m
        return [ins]

    for ins in p.body:
        if isinstance(ins, RepeatForever):
            body = [op for i in ins.body for op in expand(i)]
            if not body:
                body = [None]   # an empty iteration still takes one slot
            while True:
                yield from body
        else:
            yield from expand(ins)


def _lamp_cell(p: Program) -> str:
    names = set()

    def collect(body):
        for ins in body:
            if isinstance(ins, RepeatForever):
                collect(ins.body)
            elif isinstance(ins, Assign):
                for ref in (ins.dest, ins.expr.operand):
                    if isinstance(ref, CellRef):
                        names.add(ref.name)
    collect(p.body)
    return min(names) if names else "VALUE"


def run_zeno(p: Program, step_limit: int) -> ZenoTrace:
    """Run a loop program on one machine whose k-th operation ends at 1 - 2^-k.

    The first operation (k = 0) completes at t = 0. Every executed
    instruction counts as one operation; ``IDLE m`` counts as ``m``. The
    trace holds operations 0..step_limit.
    """
    if step_limit < 1:
        raise ValueError("step_limit must be >= 1")
    if not is_loop_dialect(p):
        raise DialectError(f"program {p.name} has no REPEAT loop")
    report = validate(p)
    if not report.ok:
        raise ValidationError(report)
    cell = _lamp_cell(p)
    byte = 0
    steps = []
    ops = _operations(p)
    for k in range(step_limit + 1):
        op = next(ops, None)
        wrote = False
        if isinstance(op, Assign):
            src = op.expr.operand
            v = byte if isinstance(src, CellRef) else src
            byte = 1 - v if op.expr.negated else v
            wrote = True
        steps.append(ZenoStep(k, zeno_time(k), byte, wrote))
    return ZenoTrace(p.name, cell, steps)


def classify_zeno(z: ZenoTrace) -> SupertaskVerdict:
    if not z.steps:
        raise SequenceTooShort("empty Zeno trace")
    return classify_values(z.values, "k")


# -- Thompson-freeness ---------------------------------------------------------

@dataclass
class FreenessReport:
    per_cell_write_counts: dict
    bounded: bool
    bound_witness: int

    def max_by_run(self) -> dict:
        out: dict = {}
        for (n, _), c in self.per_cell_write_counts.items():
            out[n] = max(out.get(n, 0), c)
        return out


def _report(counts: dict) -> FreenessReport:
    by_run: dict = {}
    for (n, _), c in counts.items():
        by_run[n] = max(by_run.get(n, 0), c)
    maxima = [by_run[n] for n in sorted(by_run)]
    # bounded: the per-run maximum settles to a constant (same transient rule as classify)
    bounded = any(_constant(maxima[k:]) for k in range(len(maxima) // 2 + 1)) if maxima else True
    return FreenessReport(counts, bounded, max(maxima, default=0))


def freeness(p: Program, n_max: int, mode: TruncationMode = TruncationMode.SKIP) -> FreenessReport:
    """Post-initialization writes per cell, for each truncation N = 1..n_max."""
    counts = {}
    for n in range(1, n_max + 1):
        result = run(p, n, mode)
        per = {cell: 0 for cell in range(1, n + 1)}
        for ev in result.trace:
            for cell, _ in ev.writes:
                per[cell] += 1
        for cell, c in per.items():
            counts[(n, cell)] = c
    return _report(counts)


def zeno_freeness(p: Program, step_limits: Iterable[int]) -> FreenessReport:
    """Write counts of the lamp cell for Zeno runs of increasing length."""
    counts = {}
    for k in step_limits:
        z = run_zeno(p, k)
        counts[(k, z.cell)] = z.write_count
    return _report(counts)
