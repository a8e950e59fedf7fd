"""Kinematics of a finite cascade of scaled mousetraps.

Trap ``n`` is a spring-loaded beam held vertical by a thread. Ball ``n``
rolls at speed ``v`` toward thread ``n``; on tearing it the beam latches
horizontally. A latched beam ``n+1`` sits across ball ``n``'s path at
distance ``b_n``, before thread ``n`` at ``d_n``. Times are exact
rationals so that event order never depends on rounding.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from itertools import count

__all__ = [
    "Beam", "Thread", "Ball", "EventKind", "MechEvent", "MechState",
    "MousetrapConfig", "Violation", "InvalidConfig", "make_config",
    "validate_config", "simulate", "largest_beam", "parity_sweep",
    "load_config", "event_lines",
]


class Beam(Enum):
    VERTICAL = "Vertical"
    LATCHED = "Latched"


class Thread(Enum):
    INTACT = "Intact"
    TORN = "Torn"


class Ball(Enum):
    MOVING = "Moving"
    BLOCKED = "Blocked"
    DONE = "Done"


class EventKind(Enum):
    THREAD_TORN = "ThreadTorn"
    BEAM_LATCHED = "BeamLatched"
    BALL_BLOCKED = "BallBlocked"
    BALL_STOPPED = "BallStopped"


class InvalidConfig(ValueError):
    def __init__(self, violations):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations) or "invalid config")


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class MousetrapConfig:
    n: int
    velocity: Fraction
    offset: Fraction
    thread_distance: tuple    # d_1..d_N
    block_distance: tuple     # b_1..b_{N-1}
    base_length: Fraction = Fraction(1)

    def d(self, n: int) -> Fraction:
        return self.thread_distance[n - 1]

    def b(self, n: int) -> Fraction:
        return self.block_distance[n - 1]


def make_config(n: int, c=0, v=1, length=1) -> MousetrapConfig:
    """Default geometry: d_n = c + 2L/2^n and b_n = c + 1.5L/2^n."""
    c, v, length = _q(c), _q(v), _q(length)
    if n < 1:
        raise ValueError("need at least one trap")
    if v <= 0 or length <= 0 or c < 0:
        raise ValueError("require v > 0, L > 0 and c >= 0")
    d = tuple(c + 2 * length / 2 ** k for k in range(1, n + 1))
    b = tuple(c + Fraction(3, 2) * length / 2 ** k for k in range(1, n))
    return MousetrapConfig(n, v, c, d, b, length)


@dataclass(frozen=True)
class Violation:
    pair: int
    rule: str     # "b<d" or "tear-before-block"

    def __str__(self):
        if self.rule == "b<d":
            return f"pair ({self.pair}, {self.pair + 1}): need b_{self.pair} < d_{self.pair}"
        return f"pair ({self.pair}, {self.pair + 1}): need d_{self.pair + 1} < b_{self.pair}"


def validate_config(cfg: MousetrapConfig) -> list:
    out = []
    if len(cfg.thread_distance) != cfg.n or len(cfg.block_distance) != cfg.n - 1:
        raise InvalidConfig([f"expected {cfg.n} thread and {cfg.n - 1} block distances"])
    for k in range(1, cfg.n):
        if not cfg.b(k) < cfg.d(k):
            out.append(Violation(k, "b<d"))
        if not cfg.d(k + 1) < cfg.b(k):
            out.append(Violation(k, "tear-before-block"))
    return out


@dataclass(frozen=True)
class MechEvent:
    time: Fraction
    kind: EventKind
    trap: int

    def to_record(self) -> dict:
        t = self.time
        return {"time": f"{t.numerator}/{t.denominator}", "kind": self.kind.value,
                "trap": self.trap}

    def to_line(self) -> str:
        return json.dumps(self.to_record(), separators=(", ", ": "))

    def __str__(self):
        return f"{self.kind.value}({self.trap})@{self.time}"


@dataclass
class MechState:
    beams: dict = field(default_factory=dict)
    threads: dict = field(default_factory=dict)
    balls: dict = field(default_factory=dict)

    def beam_word(self) -> list:
        return [self.beams[k] for k in sorted(self.beams)]


_CHECK, _THREAD = 0, 1


def simulate(cfg: MousetrapConfig) -> tuple[list, MechState]:
    """Run every ball to its terminal event.

    Ball ``n`` reaches the latch plane of beam ``n+1`` at ``b_n / v`` and is
    blocked there if that beam is already latched; otherwise it reaches
    thread ``n`` at ``d_n / v``, tears it, and beam ``n`` latches at once.
    Simultaneous events are processed in descending trap order.
    """
    violations = validate_config(cfg)
    if violations:
        raise InvalidConfig(violations)
    n = cfg.n
    st = MechState({k: Beam.VERTICAL for k in range(1, n + 1)},
                   {k: Thread.INTACT for k in range(1, n + 1)},
                   {k: Ball.MOVING for k in range(1, n + 1)})
    seq = count()
    queue = []
    for k in range(1, n + 1):
        if k < n:
            heapq.heappush(queue, (cfg.b(k) / cfg.velocity, -k, next(seq), _CHECK))
        else:
            heapq.heappush(queue, (cfg.d(k) / cfg.velocity, -k, next(seq), _THREAD))
    events = []
    while queue:
        t, neg_k, _, what = heapq.heappop(queue)
        k = -neg_k
        if st.balls[k] is not Ball.MOVING:
            continue
        if what == _CHECK:
            if st.beams[k + 1] is Beam.LATCHED:
                st.balls[k] = Ball.BLOCKED
                events.append(MechEvent(t, EventKind.BALL_BLOCKED, k))
            else:
                heapq.heappush(queue, (cfg.d(k) / cfg.velocity, -k, next(seq), _THREAD))
        elif st.beams[k] is Beam.LATCHED:
            # unreachable with one ball per trap; kept so the lane model is total
            st.balls[k] = Ball.DONE
            events.append(MechEvent(t, EventKind.BALL_STOPPED, k))
        else:
            st.threads[k] = Thread.TORN
            st.beams[k] = Beam.LATCHED
            st.balls[k] = Ball.DONE
            events.append(MechEvent(t, EventKind.THREAD_TORN, k))
            events.append(MechEvent(t, EventKind.BEAM_LATCHED, k))
    return events, st


def largest_beam(final: MechState) -> Beam:
    return final.beams[1]


def parity_sweep(n_max: int, c=0, v=1, length=1) -> list:
    """1 where the largest beam ends latched, for N = 1..n_max."""
    return [int(largest_beam(simulate(make_config(k, c, v, length))[1]) is Beam.LATCHED)
            for k in range(1, n_max + 1)]


def _parse_list(text: str) -> tuple:
    return tuple(Fraction(x.strip()) for x in text.split(",") if x.strip())


def load_config(text: str) -> MousetrapConfig:
    """Parse a ``key = value`` config (keys N, c, v, L, and optional d, b lists).

    Blank lines and ``#`` comments are ignored. Values are exact rationals
    such as ``3/8`` or ``0.375``.
    """
    kv = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        kv[key] = value
    unknown = set(kv) - {"N", "c", "v", "L", "d", "b"}
    if unknown:
        raise ValueError(f"unknown keys: {', '.join(sorted(unknown))}")
    if "N" not in kv:
        raise ValueError("missing N")
    cfg = make_config(int(kv["N"]), Fraction(kv.get("c", "0")),
                      Fraction(kv.get("v", "1")), Fraction(kv.get("L", "1")))
    if "d" in kv:
        cfg = replace(cfg, thread_distance=_parse_list(kv["d"]))
    if "b" in kv:
        cfg = replace(cfg, block_distance=_parse_list(kv["b"]))
    return cfg


def event_lines(events: list) -> list[str]:
    return [e.to_line() for e in events]
