"""``zc`` command line.

Exit codes: 0 success, 1 usage error, 2 program or validation error,
3 runtime simulation error (data race, invalid mechanism config).
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from importlib import resources

from . import cascade, diagram, lang, mousetrap, supertask
from .cascade import TruncationMode
from .timebase import to_decimal_string

EXIT_OK, EXIT_USAGE, EXIT_PROGRAM, EXIT_RUNTIME = 0, 1, 2, 3
DEFAULT_MAX_DEPTH = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def max_depth() -> int:
    raw = os.environ.get("ZC_MAX_DEPTH", str(DEFAULT_MAX_DEPTH))
    try:
        cap = int(raw)
    except ValueError:
        raise UsageError(f"ZC_MAX_DEPTH must be an integer, got {raw!r}") from None
    if cap < 1:
        raise UsageError("ZC_MAX_DEPTH must be >= 1")
    return cap


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _depth(n: int, what: str) -> int:
    cap = max_depth()
    if n > cap:
        raise UsageError(f"{what}={n} exceeds ZC_MAX_DEPTH={cap}")
    return n


def _time(t) -> str:
    return f"{t.canonical()} ({to_decimal_string(t, t.exponent)})"


def builtin_source(name: str) -> str:
    return resources.files("zenocascade").joinpath("programs", f"{name}.zc").read_text()


def _load(path: str) -> lang.Program:
    try:
        with open(path, encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return lang.parse_source(source)


def _open_out(path: str):
    return sys.stdout if path == "-" else open(path, "w", encoding="utf-8", newline="\n")


def _close_out(fh):
    if fh is not sys.stdout:
        fh.close()


# -- subcommands ---------------------------------------------------------------

def cmd_parse(args) -> int:
    prog = _load(args.program)
    report = lang.validate(prog)
    sys.stdout.write(lang.pretty(prog))
    dialect = "loop" if lang.is_loop_dialect(prog) else "cascade"
    print(f"dialect: {dialect}")
    print(f"code_size: {report.code_size} bytes")
    print(f"data_cells_used: {report.data_cells_used}")
    for _, msg in report.diagnostics:
        print(f"error: {msg}", file=sys.stderr)
    print(f"ok: {str(report.ok).lower()}")
    return EXIT_OK if report.ok else EXIT_PROGRAM


def cmd_run(args) -> int:
    n = _depth(args.machines, "--machines")
    prog = _load(args.program)
    mode = TruncationMode(args.mode)
    try:
        result = cascade.run(prog, n, mode)
    except cascade.DataRace as exc:
        if args.trace:
            fh = _open_out(args.trace)
            cascade.write_trace(exc.result.trace, fh)
            _close_out(fh)
        raise
    print(f"program: {prog.name}  machines: {n}  mode: {mode.value}")
    for i in sorted(result.final_values):
        print(f"VALUE_{i} = {result.final_values[i]}")
    print(f"completion_time = {_time(result.completion_time)}")
    print(f"race_detected = {str(result.race_detected).lower()}")
    if args.trace:
        fh = _open_out(args.trace)
        cascade.write_trace(result.trace, fh)
        _close_out(fh)
    return EXIT_OK


def cmd_sweep(args) -> int:
    n_max = _depth(args.max, "--max")
    prog = _load(args.program)
    if n_max < supertask.MIN_LENGTH:
        raise supertask.SequenceTooShort(
            f"--max {n_max}: the classifier needs at least {supertask.MIN_LENGTH} truncations")
    seq = supertask.sweep(prog, n_max, TruncationMode(args.mode))
    verdict = supertask.classify(seq)
    fh = _open_out(args.csv) if args.csv else sys.stdout
    supertask.write_sweep_csv(seq, fh)
    if args.csv:
        _close_out(fh)
    print(f"values: {seq.values}")
    print(f"verdict: {verdict} [evidence N<={n_max}, mode {seq.mode.value}]")
    print(f"witness: {verdict.witness}")
    if args.figure:
        from .plotting import parity_figure
        parity_figure(seq.values, args.figure, f"{prog.name}: VALUE_1 on M_N ({seq.mode.value})")
    return EXIT_OK


def cmd_thompson(args) -> int:
    prog = _load(args.program) if args.program else lang.parse_source(builtin_source("thompson"))
    z = supertask.run_zeno(prog, args.steps)
    print(f"{'k':>3}  {'t':<24}{z.cell}")
    for s in z.steps:
        print(f"{s.k:>3}  {_time(s.time):<24}{s.value}")
    print(f"lamp writes: {z.write_count}")
    verdict = supertask.classify_zeno(z) if len(z.steps) >= supertask.MIN_LENGTH else None
    if verdict is None:
        print(f"verdict: insufficient (need {supertask.MIN_LENGTH} steps)")
    else:
        print(f"verdict: {verdict} [evidence k<={args.steps}]")
    return EXIT_OK


def _mech_config(args) -> mousetrap.MousetrapConfig:
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.config}: {exc.strerror}") from None
        cfg = mousetrap.load_config(text)
        _depth(cfg.n, "N")
        return cfg
    if args.traps is None:
        raise UsageError("mousetrap needs --traps or --config")
    return mousetrap.make_config(_depth(args.traps, "--traps"), args.offset, args.velocity, args.length)


def cmd_mousetrap(args) -> int:
    if args.offset < 0 or args.velocity <= 0 or args.length <= 0:
        raise UsageError("require --offset >= 0, --velocity > 0, --length > 0")
    if args.sweep:
        if args.traps is None:
            raise UsageError("--sweep needs --traps (the largest N)")
        n_max = _depth(args.traps, "--traps")
        values = mousetrap.parity_sweep(n_max, args.offset, args.velocity, args.length)
        print("N,largest_beam")
        for n, v in enumerate(values, 1):
            print(f"{n},{'Latched' if v else 'Vertical'}")
        if n_max >= supertask.MIN_LENGTH:
            print(f"verdict: {supertask.classify(values)} [evidence N<={n_max}]")
        if args.figure:
            from .plotting import parity_figure
            parity_figure(values, args.figure, "largest beam latched", ylabel="latched")
        return EXIT_OK
    cfg = _mech_config(args)
    events, final = mousetrap.simulate(cfg)
    for e in events:
        print(f"t={e.time}  {e.kind.value}({e.trap})")
    print("beams: " + " ".join(f"{k}:{final.beams[k].value}" for k in sorted(final.beams)))
    beam = mousetrap.largest_beam(final)
    pose = "horizontal" if beam is mousetrap.Beam.LATCHED else "vertical"
    print(f"largest beam: {beam.value} ({pose})")
    if args.events:
        fh = _open_out(args.events)
        for line in mousetrap.event_lines(events):
            fh.write(line + "\n")
        _close_out(fh)
    return EXIT_OK


def cmd_diagram(args) -> int:
    k = _depth(args.machines, "--machines")
    if args.t_max <= 0:
        raise UsageError("--t-max must be positive")
    prog = _load(args.program)
    result = cascade.run(prog, k, TruncationMode(args.mode))
    d = diagram.build_diagram(result, k, args.t_max)
    text = diagram.render_svg(d) if args.format == "svg" else diagram.render_text(d)
    fh = _open_out(args.output)
    fh.write(text)
    _close_out(fh)
    if args.figure:
        from .plotting import timing_figure
        timing_figure(d, args.figure)
    return EXIT_OK


# -- wiring --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="zc", description="Cascade supertask simulator.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    modes = [m.value for m in TruncationMode]

    sp = sub.add_parser("parse", help="parse and validate a .zc source")
    sp.add_argument("program")
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("run", help="run a cascade program on M_1..M_N")
    sp.add_argument("program")
    sp.add_argument("--machines", "-N", type=_positive, required=True)
    sp.add_argument("--mode", choices=modes, default="skip")
    sp.add_argument("--trace", metavar="PATH", help="write the line-delimited trace ('-' for stdout)")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("sweep", help="VALUE_1 over truncations N = 1..max, with a verdict")
    sp.add_argument("program")
    sp.add_argument("--max", type=_positive, required=True)
    sp.add_argument("--mode", choices=modes, default="skip")
    sp.add_argument("--csv", metavar="PATH", help="write the table here instead of stdout")
    sp.add_argument("--figure", metavar="PATH", help="also plot the parity sequence")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("thompson", help="classical lamp on a Zeno clock")
    sp.add_argument("--steps", type=_positive, required=True)
    sp.add_argument("--program", metavar="PATH", help="loop-dialect source (default: built-in thompson)")
    sp.set_defaults(func=cmd_thompson)

    sp = sub.add_parser("mousetrap", help="simulate the scaled mousetrap cascade")
    sp.add_argument("--traps", type=_positive)
    sp.add_argument("--offset", type=_rational, default=Fraction(0))
    sp.add_argument("--velocity", type=_rational, default=Fraction(1))
    sp.add_argument("--length", type=_rational, default=Fraction(1))
    sp.add_argument("--config", metavar="PATH")
    sp.add_argument("--sweep", action="store_true", help="largest-beam parity for N = 1..traps")
    sp.add_argument("--events", metavar="PATH", help="write the line-delimited event log")
    sp.add_argument("--figure", metavar="PATH", help="with --sweep, plot the parity sequence")
    sp.set_defaults(func=cmd_mousetrap)

    sp = sub.add_parser("diagram", help="lane diagram of instruction start times")
    sp.add_argument("program")
    sp.add_argument("--machines", "-k", type=_positive, required=True)
    sp.add_argument("--format", choices=["text", "svg"], default="text")
    sp.add_argument("--mode", choices=modes, default="skip")
    sp.add_argument("--t-max", type=_rational, default=Fraction(3))
    sp.add_argument("--output", "-o", default="-")
    sp.add_argument("--figure", metavar="PATH", help="also render with matplotlib")
    sp.set_defaults(func=cmd_diagram)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits on usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"zc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (lang.LangError, cascade.DialectError, cascade.ValidationError,
            supertask.SequenceTooShort) as exc:
        print(f"zc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PROGRAM
    except (cascade.CascadeError, mousetrap.InvalidConfig) as exc:
        print(f"zc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:
        # malformed config values and the like
        print(f"zc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
