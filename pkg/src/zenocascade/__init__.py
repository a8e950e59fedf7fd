"""Deterministic simulator for cascades of ever-faster machines.

Runs the toy cascade language on finite truncations with exact dyadic
time, classifies the limit behaviour of truncation sweeps and Zeno loops,
and simulates the scaled-mousetrap mechanism.
"""

from .cascade import TruncationMode, predicted_schedule, run
from .lang import parse_source, validate
from .mousetrap import largest_beam, make_config, simulate
from .supertask import classify, classify_zeno, freeness, run_zeno, sweep
from .timebase import DyadicTime, make_dyadic

__version__ = "0.1.0"

__all__ = [
    "DyadicTime", "make_dyadic", "parse_source", "validate", "run",
    "predicted_schedule", "TruncationMode", "sweep", "classify", "run_zeno",
    "classify_zeno", "freeness", "make_config", "simulate", "largest_beam",
]
