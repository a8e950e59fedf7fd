"""Lane diagrams of instruction start times, as text or SVG."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from xml.sax.saxutils import escape

from .cascade import RunResult, observed_schedule
from .timebase import DyadicTime, to_decimal_string

__all__ = ["Mark", "TimingDiagram", "build_diagram", "render_text", "render_svg"]


@dataclass(frozen=True)
class Mark:
    machine: int
    slot: int          # i in t_{n,i}; the last slot is the exit time
    time: DyadicTime

    @property
    def label(self) -> str:
        return f"t_{self.machine},{self.slot}"


@dataclass
class TimingDiagram:
    lanes: list        # machine indices, top to bottom
    marks: list
    t_max: Fraction

    def lane_marks(self, n: int) -> list:
        return [m for m in self.marks if m.machine == n]


def as_fraction(t: DyadicTime) -> Fraction:
    num, den = t.as_fraction_parts()
    return Fraction(num, den)


def build_diagram(result: RunResult, lanes: int, t_max=3) -> TimingDiagram:
    marks = []
    for n in range(1, lanes + 1):
        times = observed_schedule(result.trace, n)
        if times == (None,):
            continue
        marks.extend(Mark(n, i, t) for i, t in enumerate(times, 1))
    return TimingDiagram(list(range(1, lanes + 1)), marks, Fraction(t_max))


def _dec(t: DyadicTime) -> str:
    return to_decimal_string(t, t.exponent) if t.exponent else str(t.numerator)


def render_text(d: TimingDiagram, width: int = 60) -> str:
    """One ruler row and one label row per lane; ``|`` marks tick columns."""
    out = [f"time axis 0 .. {d.t_max} ({width} columns)"]
    axis = [" "] * (width + 1)
    for k in range(int(d.t_max) + 1):
        axis[round(Fraction(k) / d.t_max * width)] = str(k % 10)
    out.append("      " + "".join(axis).rstrip())
    for n in d.lanes:
        row = ["-"] * (width + 1)
        for m in d.lane_marks(n):
            f = as_fraction(m.time)
            if f <= d.t_max:
                row[round(f / d.t_max * width)] = "|"
        out.append(f"M_{n:<3} " + "".join(row))
        labels = "  ".join(f"{m.label}={m.time.canonical()} ({_dec(m.time)})"
                           for m in d.lane_marks(n))
        out.append("      " + labels)
    return "\n".join(out) + "\n"


def render_svg(d: TimingDiagram, width: int = 720, lane_height: int = 60) -> str:
    """Linear time axis clipped at ``t_max``; tick x positions are exact."""
    left, right, top = 60, 20, 40
    plot_w = width - left - right
    height = top + lane_height * len(d.lanes) + 40
    scale = Fraction(plot_w) / d.t_max

    def x(t: Fraction) -> str:
        return f"{float(left + t * scale):.4f}"

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}" font-family="monospace" font-size="10">',
        '<title>Instruction start times</title>',
    ]
    axis_y = top + lane_height * len(d.lanes) + 10
    parts.append(f'<line x1="{x(Fraction(0))}" y1="{axis_y}" x2="{x(d.t_max)}" y2="{axis_y}" stroke="black"/>')
    for k in range(int(d.t_max) + 1):
        parts.append(f'<text x="{x(Fraction(k))}" y="{axis_y + 14}" text-anchor="middle">{k}</text>')
    for row, n in enumerate(d.lanes):
        y = top + row * lane_height + lane_height // 2
        parts.append(f'<g class="lane" data-machine="{n}">')
        parts.append(f'<text x="8" y="{y + 4}">M_{n}</text>')
        parts.append(f'<line x1="{x(Fraction(0))}" y1="{y}" x2="{x(d.t_max)}" y2="{y}" stroke="#999"/>')
        for m in d.lane_marks(n):
            f = as_fraction(m.time)
            if f > d.t_max:
                continue
            parts.append(
                f'<line class="tick" x1="{x(f)}" y1="{y - 8}" x2="{x(f)}" y2="{y + 8}" stroke="black" '
                f'data-label="{escape(m.label)}" data-time="{m.time.canonical()}"/>')
            parts.append(f'<text x="{x(f)}" y="{y - 12}" text-anchor="middle">'
                         f'{escape(m.time.canonical())}</text>')
        parts.append('</g>')
    parts.append('</svg>')
    return "\n".join(parts) + "\n"
