"""(a, c)-plane sweeps, conjecture probing and result export.

Every cell pairs the closed-form criteria with simulations from a fixed
set of initial conditions.  A cell where some attractivity criterion
holds but an orbit fails to converge is flagged ``VIOLATION``; it carries
the seed and the offending initial data so it can be reproduced.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .analysis import NONOSCILLATORY, OSCILLATORY, classify
from .criteria import (ATTRACTIVITY_IDS, COUNTEREXAMPLE, PROVEN_ATTRACTING,
                       PROVEN_NONOSCILLATORY, PROVEN_OSCILLATORY, evaluate_all)
from .dynamics import CONVERGED, SimulationGuards, SystemSpec, simulate
from .nonlinearities import KIND_ALIASES, NonlinearitySpec, parse, properties

__all__ = [
    "ConjectureHypothesisError",
    "Empirical",
    "InitialConditions",
    "ProbeReport",
    "SweepCell",
    "SweepConfig",
    "SweepResult",
    "export",
    "probe_conjecture",
    "run_sweep",
]

CONSISTENT, THEORY_SILENT, VIOLATION = "consistent", "theory_silent", "VIOLATION"

CSV_COLUMNS = ["a", "c", "criterion_c1", "criterion_c2", "criterion_c3", "criterion_thm2",
               "criterion_thm3", "summary", "empirical_converged", "empirical_oscillatory",
               "agreement"]


@dataclass(frozen=True)
class InitialConditions:
    """A k-by-k grid over [-r, r]^2 plus ``random_count`` seeded uniform draws.

    The equilibrium (0, 0) is dropped from the grid: its orbit is trivial.
    """

    grid_k: int = 5
    radius: float = 10.0
    random_count: int = 20
    seed: int = 0

    def points(self) -> list[tuple[float, float]]:
        pts = []
        if self.grid_k > 0:
            axis = np.linspace(-self.radius, self.radius, self.grid_k)
            pts = [(float(x0), float(x1)) for x0 in axis for x1 in axis
                   if not (x0 == 0.0 and x1 == 0.0)]
        rng = np.random.default_rng(self.seed)
        draws = rng.uniform(-self.radius, self.radius, size=(self.random_count, 2))
        pts += [(float(x0), float(x1)) for x0, x1 in draws]
        return pts


def _grid(rng_spec) -> np.ndarray:
    lo, hi, steps = rng_spec
    return np.linspace(float(lo), float(hi), int(steps))


@dataclass(frozen=True)
class SweepConfig:
    a_range: tuple = (0.05, 1.2, 50)
    c_range: tuple = (0.0, 0.95, 50)
    nonlinearity_kind: str = "tanh"
    nonlinearity_params: dict = field(default_factory=dict)
    initial_conditions: InitialConditions = field(default_factory=InitialConditions)
    guards: SimulationGuards = field(default_factory=SimulationGuards)
    parallelism: int = 1

    def __post_init__(self):
        for name in ("a_range", "c_range"):
            lo, hi, steps = getattr(self, name)
            object.__setattr__(self, name, (float(lo), float(hi), int(steps)))
            lo, hi, steps = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
                raise ValueError(f"{name} must be a finite increasing range")
            if steps < 2 and not (steps == 1 and lo == hi):
                raise ValueError(f"{name} needs steps >= 2 (or a single point with lo == hi)")
        if self.c_range[0] < 0.0 or self.c_range[1] >= 1.0:
            raise ValueError("c_range must lie in [0, 1)")
        self.nonlinearity(self.a_grid()[0])

    def nonlinearity(self, a: float) -> NonlinearitySpec:
        """The catalog member at sector gain ``a``.

        ``nonlinearity_kind`` is a catalog id or a full text form.  A
        piecewise-linear shape is rescaled so its sector bound equals ``a``;
        kinds without a gain (zero, sublinear) ignore the a-axis.
        """
        text = self.nonlinearity_kind
        params = {("lam" if k == "lambda" else k): float(v)
                  for k, v in self.nonlinearity_params.items()}
        if ":" in text:
            base = parse(text)
            base = NonlinearitySpec(base.kind, a=base.a, lam=params.get("lam", base.lam),
                                    cap=params.get("cap", base.cap), points=base.points)
        else:
            kind = KIND_ALIASES.get(text.strip().lower())
            if kind is None:
                raise ValueError(f"unknown nonlinearity kind {text!r}")
            if kind == "piecewise_linear":
                raise ValueError("pwl needs its breakpoints: use the text form pwl:(x,y);...")
            if kind == "sublinear_power" and "lam" not in params:
                raise ValueError("sublinear needs nonlinearity_params {'lambda': ...}")
            base = NonlinearitySpec(kind, **params)
        if base.kind in ("zero", "sublinear_power"):
            return base
        if base.kind == "piecewise_linear":
            scale = a / properties(base).sector_bound
            return NonlinearitySpec(base.kind, points=tuple((x, y * scale) for x, y in base.points))
        return base.with_a(a)

    def a_grid(self) -> np.ndarray:
        return _grid(self.a_range)

    def c_grid(self) -> np.ndarray:
        return _grid(self.c_range)

    def to_dict(self) -> dict:
        return {
            "a_range": list(self.a_range),
            "c_range": list(self.c_range),
            "nonlinearity_kind": self.nonlinearity_kind,
            "nonlinearity_params": dict(self.nonlinearity_params),
            "initial_conditions": asdict(self.initial_conditions),
            "guards": self.guards.to_dict(),
            "parallelism": self.parallelism,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        d = dict(d)
        if "initial_conditions" in d:
            d["initial_conditions"] = InitialConditions(**d["initial_conditions"])
        if "guards" in d:
            d["guards"] = SimulationGuards(**d["guards"])
        for k in ("a_range", "c_range"):
            if k in d:
                d[k] = tuple(d[k])
        return cls(**d)

    @classmethod
    def load(cls, path) -> "SweepConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class Empirical:
    orbits: int
    converged: int
    diverged: int
    horizon_reached: int
    oscillatory: int
    nonoscillatory: int
    undetermined: int

    @property
    def all_converged(self) -> bool:
        return self.converged == self.orbits

    @property
    def all_oscillatory(self) -> bool:
        return self.oscillatory == self.orbits


@dataclass(frozen=True)
class SweepCell:
    a: float
    c: float
    criteria: dict
    summary: str
    empirical: Empirical
    agreement: str
    seed: int
    failures: tuple = ()

    def to_dict(self) -> dict:
        return {"a": self.a, "c": self.c, "criteria": dict(self.criteria),
                "summary": self.summary, "empirical": asdict(self.empirical),
                "agreement": self.agreement, "seed": self.seed,
                "failures": [list(p) for p in self.failures]}

    @classmethod
    def from_dict(cls, d: dict) -> "SweepCell":
        return cls(d["a"], d["c"], dict(d["criteria"]), d["summary"],
                   Empirical(**d["empirical"]), d["agreement"], d["seed"],
                   tuple(tuple(p) for p in d["failures"]))


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    cells: tuple

    @property
    def violations(self) -> list:
        return [cell for cell in self.cells if cell.agreement == VIOLATION]

    def to_dict(self) -> dict:
        return {"config": self.config.to_dict(), "cells": [c.to_dict() for c in self.cells]}

    @classmethod
    def from_dict(cls, d: dict) -> "SweepResult":
        return cls(SweepConfig.from_dict(d["config"]),
                   tuple(SweepCell.from_dict(c) for c in d["cells"]))


def _agreement(summary: str, emp: Empirical) -> str:
    if summary == PROVEN_ATTRACTING:
        return CONSISTENT if emp.all_converged else VIOLATION
    if summary == COUNTEREXAMPLE:
        return CONSISTENT
    if summary == PROVEN_OSCILLATORY:
        return CONSISTENT if emp.nonoscillatory == 0 else THEORY_SILENT
    if summary == PROVEN_NONOSCILLATORY:
        return CONSISTENT if emp.oscillatory == 0 else THEORY_SILENT
    return THEORY_SILENT


def _run_cell(args) -> SweepCell:
    cfg, a, c, ics = args
    spec = SystemSpec(c, cfg.nonlinearity(a))
    report = evaluate_all(spec)
    crit = {r.id: r.satisfied for r in report.results}
    counts = dict(converged=0, diverged=0, horizon_reached=0, oscillatory=0,
                  nonoscillatory=0, undetermined=0)
    failures = []
    for x0, x1 in ics:
        traj = simulate(spec, x0, x1, cfg.guards)
        key = traj.termination.replace("-", "_")
        counts[key] += 1
        if traj.termination != CONVERGED:
            failures.append((x0, x1))
        counts[classify(traj).oscillation] += 1
    emp = Empirical(len(ics), **counts)
    agreement = _agreement(report.summary, emp)
    return SweepCell(a, c, crit, report.summary, emp, agreement,
                     cfg.initial_conditions.seed,
                     tuple(failures) if agreement == VIOLATION else ())


def _cells(cfg: SweepConfig, points=None):
    ics = cfg.initial_conditions.points()
    pts = points if points is not None else [(float(a), float(c)) for a in cfg.a_grid()
                                             for c in cfg.c_grid()]
    return [(cfg, a, c, ics) for a, c in pts]


def _map(fn, jobs, workers: int):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [fn(job) for job in jobs]


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Evaluate criteria and simulate every cell; cells come back in grid order
    (a outer, c inner) whatever the worker count."""
    return SweepResult(cfg, tuple(_map(_run_cell, _cells(cfg), cfg.parallelism)))


def _bit(v: bool) -> str:
    return "1" if v else "0"


def csv_text(result: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for cell in result.cells:
        w.writerow([repr(cell.a), repr(cell.c)]
                   + [_bit(cell.criteria[k]) for k in ATTRACTIVITY_IDS]
                   + [cell.summary, _bit(cell.empirical.all_converged),
                      _bit(cell.empirical.all_oscillatory), cell.agreement])
    return buf.getvalue()


def dumps(obj) -> str:
    return json.dumps(obj.to_dict(), indent=2) + "\n"


def export(result, fmt: str, path) -> None:
    """Write a sweep (csv or json) or a probe report (json) to ``path``."""
    if fmt == "csv":
        if not isinstance(result, SweepResult):
            raise ValueError("csv export is only defined for sweep results")
        text = csv_text(result)
    elif fmt == "json":
        text = dumps(result)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


# -- conjecture probing ------------------------------------------------------

class ConjectureHypothesisError(ValueError):
    pass


@dataclass(frozen=True)
class ProbeReport:
    conjecture: str
    nonlinearity_kind: str
    cells_total: int
    cells_in_gap: int
    cells_proven: int
    cells_out_of_range: int
    orbits_simulated: int
    reruns: int
    seed: int
    candidates: tuple = ()

    @property
    def counterexample_found(self) -> bool:
        return bool(self.candidates)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["candidates"] = [dict(c) for c in self.candidates]
        d["counterexample_found"] = self.counterexample_found
        return d


_HYPOTHESES = {
    "conjecture1": ("sign_preserving", "t*f(t) >= 0 for all t"),
    "conjecture2": ("nonnegative", "f(t) >= 0 for all t"),
}


def _probe_cell(args):
    cfg, a, c, ics = args
    spec = SystemSpec(c, cfg.nonlinearity(a))
    long_guards = replace(cfg.guards, horizon=10 * cfg.guards.horizon)
    reruns, candidates = 0, []
    for x0, x1 in ics:
        traj = simulate(spec, x0, x1, cfg.guards)
        if traj.termination == CONVERGED:
            continue
        reruns += 1
        traj = simulate(spec, x0, x1, long_guards)
        if traj.termination != CONVERGED:
            candidates.append({
                "a": a, "c": c, "nonlinearity": spec.f.to_text(), "x0": x0, "x1": x1,
                "seed": cfg.initial_conditions.seed, "horizon": long_guards.horizon,
                "termination": traj.termination,
                "tail": [float(v) for v in traj.values[-10:]],
            })
    return reruns, candidates


def probe_conjecture(which, cfg: SweepConfig) -> ProbeReport:
    """Search the cells no proven criterion covers for non-convergent orbits.

    A cell is in the gap when 0 < a < 1 and none of C1, C2, C3, THM2, THM3
    holds.  Orbits that fail to converge are re-run with ten times the
    horizon before they are reported.
    """
    which = {"1": "conjecture1", "2": "conjecture2"}.get(str(which), str(which))
    if which not in _HYPOTHESES:
        raise ValueError(f"unknown conjecture {which!r}")
    flag, text = _HYPOTHESES[which]
    probe_f = cfg.nonlinearity(0.5)
    flags = properties(probe_f).flags
    if not (getattr(flags, flag) and flags.globally_sectored):
        raise ConjectureHypothesisError(
            f"{probe_f.kind} violates the {which} hypothesis: need {text} and |f(t)| <= a|t|")

    gap, proven, out_of_range = [], 0, 0
    total = 0
    for a in cfg.a_grid():
        for c in cfg.c_grid():
            total += 1
            a, c = float(a), float(c)
            if not 0.0 < a < 1.0:
                out_of_range += 1
                continue
            report = evaluate_all(SystemSpec(c, cfg.nonlinearity(a)))
            if any(report.get(cid).satisfied for cid in ATTRACTIVITY_IDS):
                proven += 1
                continue
            gap.append((a, c))

    jobs = _cells(cfg, gap)
    results = _map(_probe_cell, jobs, cfg.parallelism)
    n_ics = len(cfg.initial_conditions.points())
    candidates = tuple(cand for _, cands in results for cand in cands)
    return ProbeReport(which, cfg.nonlinearity(0.5).kind, total, len(gap), proven,
                       out_of_range, n_ics * len(gap), sum(r for r, _ in results),
                       cfg.initial_conditions.seed, candidates)
