"""Matplotlib figures for reports. The output format follows the file suffix."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .diagram import TimingDiagram, as_fraction  # noqa: E402

_RC = {
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "zenocascade",
    "svg.fonttype": "none",
}


def _save(fig, path):
    # no timestamps in the metadata so reruns are byte-identical
    meta = {"Date": None} if str(path).endswith((".svg", ".pdf")) else None
    fig.savefig(path, metadata=meta, bbox_inches="tight")
    plt.close(fig)


def timing_figure(d: TimingDiagram, path) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6.4, 0.8 + 0.6 * len(d.lanes)))
        for row, n in enumerate(d.lanes):
            marks = d.lane_marks(n)
            xs = [float(as_fraction(m.time)) for m in marks]
            ax.hlines(-row, 0, float(d.t_max), color="0.8", lw=1)
            ax.plot(xs, [-row] * len(xs), "|", ms=14, color="k")
            for m, xv in zip(marks, xs):
                ax.annotate(m.time.canonical(), (xv, -row), xytext=(0, 8),
                            textcoords="offset points", ha="center", fontsize=7)
        ax.set_yticks([-r for r in range(len(d.lanes))], [f"M_{n}" for n in d.lanes])
        ax.set_xlim(0, float(d.t_max))
        ax.set_xlabel("time")
        _save(fig, path)


def parity_figure(values: list, path, title: str = "", ylabel: str = "VALUE_1") -> None:
    """Step plot of a 0/1 sequence indexed N = 1..len(values)."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6.4, 2.4))
        ns = list(range(1, len(values) + 1))
        ax.step(ns, values, where="mid", color="k", lw=1)
        ax.plot(ns, values, "o", color="k", ms=3)
        ax.set_yticks([0, 1])
        ax.set_xlabel("N")
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        _save(fig, path)
