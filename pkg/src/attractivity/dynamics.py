"""Simulation of x' = c*x + f(x - x_prev) and of its first-difference form.

Writing y_n = x_n - x_{n-1} turns the level equation into

    y_{n+1} = c*y_n + f(y_n) - f(y_{n-1}),   n >= 2,

and the two are equivalent once y_2 is seeded as (c - 1)*x_1 + f(y_1).
Both recurrences run through the same compiled loop, so orbits are
bit-reproducible for identical inputs.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernel
from .nonlinearities import NonlinearitySpec, parse

__all__ = [
    "SimulationGuards",
    "SystemSpec",
    "Trajectory",
    "difference_orbit",
    "recurrence_residual",
    "seed_difference",
    "simulate",
    "simulate_difference",
    "step",
]

X_ORBIT, Y_ORBIT = "x-orbit", "y-orbit"
HORIZON_REACHED, DIVERGED, CONVERGED = "horizon-reached", "diverged", "converged"
_TERMINATION = {_kernel.HORIZON: HORIZON_REACHED, _kernel.DIVERGED: DIVERGED,
                _kernel.CONVERGED: CONVERGED}


@dataclass(frozen=True)
class SystemSpec:
    c: float
    f: NonlinearitySpec

    def __post_init__(self):
        if not (0.0 <= self.c < 1.0):
            raise ValueError(f"c must lie in [0, 1), got {self.c}")

    def to_dict(self) -> dict:
        return {"c": self.c, "nonlinearity": self.f.to_text()}


@dataclass(frozen=True)
class SimulationGuards:
    horizon: int = 100_000
    divergence_bound: float = 1e12
    convergence_tol: float = 1e-9
    convergence_window: int = 50

    def __post_init__(self):
        if not self.horizon >= self.convergence_window >= 2:
            raise ValueError("need horizon >= convergence_window >= 2")
        if not self.divergence_bound > self.convergence_tol > 0:
            raise ValueError("need divergence_bound > convergence_tol > 0")

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A finite orbit.

    ``values[0]`` is x_0 for an x-orbit and y_1 for a y-orbit, so
    ``index(k)`` maps array position to the equation's time index.
    """

    values: np.ndarray
    kind: str
    termination: str
    spec: SystemSpec
    guards: Optional[SimulationGuards] = field(default=None)

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.kind not in (X_ORBIT, Y_ORBIT):
            raise ValueError(f"bad orbit kind {self.kind!r}")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def first_index(self) -> int:
        return 0 if self.kind == X_ORBIT else 1

    def index(self, k: int) -> int:
        return self.first_index + k

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "c": self.spec.c,
            "nonlinearity": self.spec.f.to_text(),
            "termination": self.termination,
            "values": [float(v) for v in self.values],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Trajectory":
        spec = SystemSpec(float(d["c"]), parse(d["nonlinearity"]))
        return cls(np.asarray(d["values"], dtype=np.float64), d["kind"], d["termination"], spec)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "value"])
        for k, v in enumerate(self.values):
            w.writerow([self.index(k), repr(float(v))])
        return buf.getvalue()


def _check_finite(*vals):
    for v in vals:
        if not math.isfinite(v):
            raise ValueError(f"non-finite input {v!r}")


def step(spec: SystemSpec, x_prev: float, x_curr: float) -> float:
    """One step of the level equation: c*x_curr + f(x_curr - x_prev)."""
    _check_finite(x_prev, x_curr)
    return spec.c * x_curr + spec.f(x_curr - x_prev)


def _run(spec, v0, v1, guards, difference):
    guards = guards or SimulationGuards()
    _check_finite(v0, v1)
    code, p, xs, ys = spec.f.kernel_args()
    vals, term = _kernel.run_orbit(code, p, xs, ys, float(spec.c), float(v0), float(v1),
                                   difference, guards.horizon, guards.divergence_bound,
                                   guards.convergence_tol, guards.convergence_window)
    kind = Y_ORBIT if difference else X_ORBIT
    return Trajectory(vals.copy(), kind, _TERMINATION[term], spec, guards)


def simulate(spec: SystemSpec, x0: float, x1: float,
             guards: Optional[SimulationGuards] = None) -> Trajectory:
    """Iterate the level equation from (x0, x1) until a guard fires.

    Stops as *diverged* when a value leaves [-M, M] or is not finite, as
    *converged* after W consecutive values with |x| <= tol, and otherwise
    after ``horizon`` new values.
    """
    return _run(spec, x0, x1, guards, False)


def simulate_difference(spec: SystemSpec, y1: float, y2: float,
                        guards: Optional[SimulationGuards] = None) -> Trajectory:
    """Iterate y' = c*y + f(y) - f(y_prev) from (y1, y2) under the same guards."""
    return _run(spec, y1, y2, guards, True)


def seed_difference(spec: SystemSpec, x0: float, x1: float) -> tuple[float, float]:
    """(y1, y2) matching the level orbit started at (x0, x1)."""
    y1 = x1 - x0
    return y1, (spec.c - 1.0) * x1 + spec.f(y1)


def difference_orbit(traj: Trajectory) -> Trajectory:
    if len(traj) < 2:
        raise ValueError("need at least two values to difference")
    if traj.kind != X_ORBIT:
        raise ValueError("difference_orbit expects an x-orbit")
    return Trajectory(np.diff(traj.values), Y_ORBIT, traj.termination, traj.spec, traj.guards)


def recurrence_residual(traj: Trajectory) -> float:
    """Largest one-step defect of ``traj`` against its own recurrence."""
    v = traj.values
    if len(v) < 3:
        raise ValueError("need at least three values")
    c, f = traj.spec.c, traj.spec.f
    worst = 0.0
    if traj.kind == X_ORBIT:
        for n in range(1, len(v) - 1):
            worst = max(worst, abs(v[n + 1] - (c * v[n] + f(v[n] - v[n - 1]))))
    else:
        for n in range(1, len(v) - 1):
            worst = max(worst, abs(v[n + 1] - (c * v[n] + f(v[n]) - f(v[n - 1]))))
    return float(worst)
