"""Command-line front end.

Exit codes: 0 success, 1 a reproduction check failed, 2 usage error,
3 an increase was found under ``--expect-monotone``, 4 an evaluation ran out
of budget.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import shlex
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .darts import UnsupportedOperation
from .expectation import ENGINES, EvalSpec
from .optimizer import DARTBOARD_SPEC, dartboard_sweep, g_curve
from .parsing import ExpressionError, fmt, parse_dart, parse_payoff
from .payoffs import ConstructionUnavailable
from .reproduce import CASES, run_case
from .svg import line_chart

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_MONOTONE, EXIT_BUDGET = 0, 1, 2, 3, 4

log = logging.getLogger("dartreason")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dartreason", description="Expected-payoff curves for darts.")
    parser.add_argument("--config", metavar="FILE", help="key = value lines mirroring flags")
    parser.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    g = sub.add_parser("g-curve", help="g(d) = sup_a E f(a + dX) on a grid of d")
    g.add_argument("--dart", required=True)
    g.add_argument("--payoff", required=True)
    g.add_argument("--d-min", type=float, required=True)
    g.add_argument("--d-max", type=float, required=True)
    g.add_argument("--steps", type=int, default=20)
    g.add_argument("--engine", choices=ENGINES, default="auto")
    g.add_argument("--tol", type=float, default=1e-6)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--max-evals", type=int, default=2_000_000)
    g.add_argument("--out", required=True)
    g.add_argument("--svg")
    g.add_argument("--expect-monotone", action="store_true")

    b = sub.add_parser("dartboard-sweep", help="best score on the standard board vs disc radius")
    b.add_argument("--r-min", type=float, default=1.0)
    b.add_argument("--r-max", type=float, default=170.0)
    b.add_argument("--steps", type=int, default=50)
    b.add_argument("--tol", type=float, default=DARTBOARD_SPEC.abs_tol)
    b.add_argument("--out", required=True)
    b.add_argument("--svg")

    r = sub.add_parser("reproduce", help="run a named reproduction case")
    r.add_argument("case", help="one of: " + ", ".join(CASES))
    return parser


def _read_config(path):
    out = {}
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _apply_config(parser, argv, config):
    """Config values become defaults, so explicit flags still win."""
    sub_action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    # Required flags may come from the config, so the command is located
    # without a full parse.
    command = next((a for a in argv if a in sub_action.choices), None)
    targets = [parser] + ([sub_action.choices[command]] if command else [])
    known = {}
    for p in targets:
        for act in p._actions:
            if act.dest not in ("help", "config", "version", "command"):
                known[act.dest] = (p, act)
    for key, value in config.items():
        if key not in known:
            raise UsageError(f"unknown config key {key!r}")
        p, act = known[key]
        if isinstance(act, argparse._StoreTrueAction):
            conv = value.lower() in ("1", "true", "yes", "on")
        else:
            try:
                conv = act.type(value) if act.type else value
            except ValueError as exc:
                raise UsageError(f"config {key}: {exc}") from None
        if act.choices and conv not in act.choices:
            raise UsageError(f"config {key}: {value!r} not in {list(act.choices)}")
        act.required = False
        p.set_defaults(**{key: conv})


# -- output ---------------------------------------------------------------------------

def _header(argv, settings):
    lines = [f"command: dartreason {shlex.join(argv)}", f"version: {__version__}"]
    lines += [f"{k}: {v}" for k, v in settings.items()]
    return "".join(f"# {line}\n" for line in lines)


def _write_outputs(args, argv, settings, header_row, rows, svg_text, t0):
    buf = io.StringIO()
    buf.write(_header(argv, settings))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header_row)
    w.writerows(rows)
    out = Path(args.out)
    out.write_text(buf.getvalue())
    digests = {str(out): hashlib.sha256(out.read_bytes()).hexdigest()}
    if args.svg and svg_text is not None:
        Path(args.svg).write_text(svg_text)
        digests[str(args.svg)] = hashlib.sha256(Path(args.svg).read_bytes()).hexdigest()
    manifest = {"command": ["dartreason", *argv], "version": __version__, **settings,
                "wall_time_s": round(time.perf_counter() - t0, 3), "digests": digests}
    Path(str(out) + ".manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _num(x):
    return repr(float(x))


def cmd_g_curve(args, argv):
    t0 = time.perf_counter()
    try:
        dart = parse_dart(args.dart)
        payoff = parse_payoff(args.payoff)
    except (ExpressionError, ConstructionUnavailable) as exc:
        raise UsageError(str(exc)) from None
    if payoff.dim is not None and payoff.dim != dart.dim:
        raise UsageError(f"dart is {dart.dim}-D but payoff is {payoff.dim}-D")
    if args.steps < 1 or not 0 < args.d_min <= args.d_max:
        raise UsageError("need 0 < d-min <= d-max and steps >= 1")
    grid = sorted(set(np.linspace(args.d_min, args.d_max, args.steps).tolist()))
    try:
        spec = EvalSpec(engine=args.engine, abs_tol=args.tol, seed=args.seed, max_evals=args.max_evals)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    curve = g_curve(dart, payoff, grid, spec, threads=args.threads)
    dim = dart.dim
    head = ["d", "g"] + [f"aim_{i}" for i in range(dim)] + ["err_est", "n_evals", "status"]
    rows = [[_num(p.d), _num(p.g), *[_num(a) for a in p.aim], _num(p.err_est), p.n_evals, p.status]
            for p in curve.points]
    settings = {"seed": args.seed, "engine": args.engine, "tol": fmt(args.tol),
                "max_evals": args.max_evals}
    svg = None
    if args.svg:
        svg = line_chart(curve.d_grid, [p.g for p in curve.points],
                         [(a, b) for a, b, _ in curve.increases],
                         title=f"g-curve: {args.dart} / {args.payoff}", x_label="d", y_label="g(d)")
    _write_outputs(args, argv, settings, head, rows, svg, t0)
    for a, b, m in curve.increases:
        print(f"increase: g({fmt(a)}) -> g({fmt(b)}) by {m:.6g}")
    if any(p.status == "budget" for p in curve.points):
        print("warning: evaluation budget exceeded at some grid points", file=sys.stderr)
        return EXIT_BUDGET
    if args.expect_monotone and curve.increases:
        return EXIT_MONOTONE
    return EXIT_OK


def cmd_dartboard_sweep(args, argv):
    t0 = time.perf_counter()
    if args.steps < 1 or not 0 < args.r_min <= args.r_max <= 400:
        raise UsageError("need 0 < r-min <= r-max <= 400 and steps >= 1")
    grid = sorted(set(np.linspace(args.r_min, args.r_max, args.steps).tolist()))
    spec = EvalSpec(abs_tol=args.tol)
    curve = dartboard_sweep(grid, spec, threads=args.threads)
    head = ["radius_mm", "best_score", "aim_x_mm", "aim_y_mm", "sector_label", "err_est"]
    rows = [[_num(p.d), _num(p.g), _num(p.aim[0]), _num(p.aim[1]), p.label, _num(p.err_est)]
            for p in curve.points]
    svg = None
    if args.svg:
        svg = line_chart(curve.d_grid, [p.g for p in curve.points],
                         [(a, b) for a, b, _ in curve.increases],
                         title="Standard dartboard: best expected score",
                         x_label="disc radius (mm)", y_label="best score")
    _write_outputs(args, argv, {"tol": fmt(args.tol)}, head, rows, svg, t0)
    for a, b, m in curve.increases:
        print(f"increase: r {fmt(a)} -> {fmt(b)} mm, +{m:.4f}")
    for a, b, dist in curve.aim_jumps:
        print(f"aim jump: r {fmt(a)} -> {fmt(b)} mm, {dist:.1f} mm")
    if any(p.status == "budget" for p in curve.points):
        print("note: some radii hit the polar-grid budget; see err_est", file=sys.stderr)
    return EXIT_OK


def cmd_reproduce(args, argv):
    if args.case not in CASES:
        raise UsageError(f"unknown case {args.case!r}; choose from {', '.join(CASES)}")
    checks = run_case(args.case, threads=max(args.threads, 1))
    for c in checks:
        print(c.line())
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


COMMANDS = {"g-curve": cmd_g_curve, "dartboard-sweep": cmd_dartboard_sweep,
            "reproduce": cmd_reproduce}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config")
        known, _ = pre.parse_known_args(argv)
        if known.config:
            try:
                config = _read_config(known.config)
            except OSError as exc:
                raise UsageError(f"cannot read config: {exc}") from None
            _apply_config(parser, argv, config)
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required")
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        return COMMANDS[args.command](args, argv)
    except UsageError as exc:
        print(f"dartreason: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UnsupportedOperation, ValueError) as exc:
        print(f"dartreason: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
