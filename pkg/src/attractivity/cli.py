"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 a sweep VIOLATION or a probe
counterexample candidate was found.
"""

from __future__ import annotations

import argparse
import json
import sys

from .analysis import classify
from .criteria import evaluate_all
from .dynamics import SimulationGuards, SystemSpec, simulate
from .lyapunov import InfeasibleWindow, make_certificate, verify_orbit
from .nonlinearities import parse, properties
from .sweep import SweepConfig, csv_text, dumps, export, probe_conjecture, run_sweep

EXIT_OK, EXIT_INVALID, EXIT_VIOLATION = 0, 2, 3


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _guard_args(p):
    g = SimulationGuards()
    p.add_argument("--horizon", type=int, default=g.horizon)
    p.add_argument("--bound", type=float, default=g.divergence_bound,
                   help="divergence guard M")
    p.add_argument("--tol", type=float, default=g.convergence_tol,
                   help="convergence tolerance")
    p.add_argument("--window", type=int, default=g.convergence_window,
                   help="consecutive in-tolerance values needed to declare convergence")


def _orbit_args(p):
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--f", required=True, help="nonlinearity, e.g. tanh:a=0.8")
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--x1", type=float, required=True)
    _guard_args(p)


def _guards(ns) -> SimulationGuards:
    return SimulationGuards(ns.horizon, ns.bound, ns.tol, ns.window)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="attractivity")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate one orbit")
    _orbit_args(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("classify", help="simulate and classify one orbit")
    _orbit_args(p)

    p = sub.add_parser("criteria", help="evaluate every criterion")
    p.add_argument("--a", type=float, help="sector bound (defaults to the declared one)")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--f", required=True)

    p = sub.add_parser("certificate", help="build a Lyapunov certificate")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--theorem", choices=("2", "3"), required=True)
    p.add_argument("--ratio", type=float, default=0.5,
                   help="position inside the feasibility window, in (0, 1)")
    p.add_argument("--f", help="verify along an orbit of this nonlinearity")
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--x1", type=float, default=1.0)

    for name, helptext in (("sweep", "sweep the (a, c) plane"),
                           ("probe", "search a conjecture gap for counterexamples")):
        p = sub.add_parser(name, help=helptext)
        if name == "probe":
            p.add_argument("--conjecture", choices=("1", "2"), required=True)
        p.add_argument("--config", required=True, help="JSON file mirroring SweepConfig")
        p.add_argument("--out", help="write the result here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def _run(ns) -> int:
    if ns.command in ("simulate", "classify"):
        spec = SystemSpec(ns.c, parse(ns.f))
        traj = simulate(spec, ns.x0, ns.x1, _guards(ns))
        if ns.command == "classify":
            _emit(classify(traj).to_dict())
        elif ns.format == "csv":
            sys.stdout.write(traj.to_csv())
        else:
            _emit(traj.to_dict())
        return EXIT_OK

    if ns.command == "criteria":
        spec = SystemSpec(ns.c, parse(ns.f))
        _emit(evaluate_all(spec, ns.a).to_dict())
        return EXIT_OK

    if ns.command == "certificate":
        cert = make_certificate(ns.a, ns.c, ns.theorem, ns.ratio)
        out = cert.to_dict()
        if ns.f:
            f = parse(ns.f)
            if properties(f).sector_bound > ns.a:
                raise ValueError(f"{ns.f} is not bounded by a={ns.a}")
            rep = verify_orbit(cert, simulate(SystemSpec(ns.c, f), ns.x0, ns.x1))
            out.update(verified=rep.verified, first_violation=rep.first_violation,
                       verification=rep.to_dict())
        _emit(out)
        return EXIT_OK

    cfg = SweepConfig.load(ns.config)
    if ns.command == "sweep":
        result = run_sweep(cfg)
        flagged = bool(result.violations)
    else:
        if ns.format == "csv":
            raise ValueError("probe reports are JSON only")
        result = probe_conjecture(ns.conjecture, cfg)
        flagged = result.counterexample_found
    if ns.out:
        export(result, ns.format, ns.out)
    elif ns.format == "csv":
        sys.stdout.write(csv_text(result))
    else:
        sys.stdout.write(dumps(result))
    return EXIT_VIOLATION if flagged else EXIT_OK


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        return _run(ns)
    except (ValueError, KeyError, TypeError, InfeasibleWindow, json.JSONDecodeError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
