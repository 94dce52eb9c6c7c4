"""Quadratic Lyapunov-like certificates for the first-difference recurrence.

Along a y-orbit the sequence

    V_n = beta*(y_n - f(y_{n-1}))**2 + gamma*f(y_{n-1})**2,   n >= 2,

decreases by at least K*y_n**2 per step whenever the weight ratio lies in
the theorem's feasibility window, where K is the decrease constant.  The
sector-bound certificate (THM2) draws beta/gamma from its window with
gamma = 1; the nonnegative-f certificate (THM3) draws gamma/beta with
beta = 1 and only holds on the eventually-positive tail of the level orbit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .criteria import criterion_thm2, criterion_thm3, thm3_l
from .dynamics import DIVERGED, SystemSpec, Trajectory, X_ORBIT, Y_ORBIT, difference_orbit
from .nonlinearities import properties

__all__ = [
    "InfeasibleWindow",
    "LyapunovCertificate",
    "LyapunovTrace",
    "VerificationReport",
    "Window",
    "make_certificate",
    "positive_tail_start",
    "trace",
    "verify_decrease",
    "verify_orbit",
    "window_thm2",
    "window_thm3",
]

THM2, THM3 = "THM2", "THM3"


class InfeasibleWindow(ValueError):
    """No admissible weight ratio exists for the requested (a, c)."""


@dataclass(frozen=True)
class Window:
    lo: float
    hi: float

    def point(self, ratio_choice: float = 0.5) -> float:
        if not 0.0 < ratio_choice < 1.0:
            raise ValueError("ratio_choice must lie in (0, 1)")
        return self.lo + ratio_choice * (self.hi - self.lo)

    def __iter__(self):
        return iter((self.lo, self.hi))


def window_thm2(a: float, c: float) -> Optional[Window]:
    """Open interval of beta/gamma giving a positive decrease constant.

    Its endpoints are the roots of (1-c)^2 r^2 - (1-c^2) r + a^2 = 0.
    Returns None when a >= (1 + c)/2.
    """
    if not criterion_thm2(a, c).satisfied:
        return None
    disc = max((1.0 + c) ** 2 - 4.0 * a * a, 0.0)
    hi = (1.0 + c + math.sqrt(disc)) / (2.0 * (1.0 - c))
    # Small root from the product of roots, avoiding cancellation.
    lo = a * a / ((1.0 - c) ** 2 * hi)
    return Window(lo, hi)


def window_thm3(a: float, c: float) -> Optional[Window]:
    """Open interval 2(1-c)l < gamma/beta < (1-c^2)/a^2, or None when empty."""
    if not criterion_thm3(a, c).satisfied or a <= 0.0:
        return None
    return Window(2.0 * (1.0 - c) * thm3_l(a, c), (1.0 - c * c) / (a * a))


@dataclass(frozen=True)
class LyapunovCertificate:
    theorem: str
    a: float
    c: float
    beta: float
    gamma: float
    decrease_constant: float
    window: Window

    def to_dict(self) -> dict:
        return {"theorem": self.theorem, "a": self.a, "c": self.c, "beta": self.beta,
                "gamma": self.gamma, "decrease_constant": self.decrease_constant,
                "window": [self.window.lo, self.window.hi]}


def make_certificate(a: float, c: float, theorem: str = THM2,
                     ratio_choice: float = 0.5) -> LyapunovCertificate:
    theorem = {"2": THM2, "3": THM3}.get(str(theorem), str(theorem).upper())
    if theorem == THM2:
        win = window_thm2(a, c)
        if win is None:
            raise InfeasibleWindow(f"no THM2 window at a={a}, c={c}")
        beta, gamma = win.point(ratio_choice), 1.0
        k = -gamma * a * a - beta * beta / gamma * (1.0 - c) ** 2 + beta * (1.0 - c * c)
    elif theorem == THM3:
        win = window_thm3(a, c)
        if win is None:
            raise InfeasibleWindow(f"no THM3 window at a={a}, c={c}")
        beta, gamma = 1.0, win.point(ratio_choice)
        k = beta * (1.0 - c * c) - gamma * a * a
        if not 2.0 * beta * (1.0 - c) * thm3_l(a, c) - gamma < 0.0:
            raise InfeasibleWindow("cross-term weight not negative (degenerate window)")
    else:
        raise ValueError(f"unknown theorem {theorem!r}")
    if not k > 0.0:
        raise InfeasibleWindow(f"decrease constant {k} not positive (degenerate window)")
    return LyapunovCertificate(theorem, a, c, beta, gamma, k, win)


@dataclass(frozen=True, eq=False)
class LyapunovTrace:
    """V_n for n = 2..N and their forward differences, aligned with ``orbit``.

    ``values[j]`` is V at n = 2 + j and ``deltas[j]`` is V_{n+1} - V_n.
    """

    values: np.ndarray
    deltas: np.ndarray
    orbit: Trajectory


def trace(cert: LyapunovCertificate, orbit: Trajectory,
          spec: Optional[SystemSpec] = None) -> LyapunovTrace:
    if orbit.kind != Y_ORBIT:
        raise ValueError("trace needs a y-orbit")
    if len(orbit) < 3:
        raise ValueError("trace needs at least three values")
    f = (spec or orbit.spec).f
    y = orbit.values
    fy = np.array([f(float(v)) for v in y[:-1]])
    v = cert.beta * (y[1:] - fy) ** 2 + cert.gamma * fy ** 2
    return LyapunovTrace(v, np.diff(v), orbit)


@dataclass(frozen=True)
class VerificationReport:
    theorem: str
    beta: float
    gamma: float
    decrease_constant: float
    window: tuple
    verified: bool
    first_violation: Optional[int]
    start_index: int
    checked: int
    sum_sq: float
    sum_sq_bound: float
    skipped: Optional[str] = None

    def to_dict(self) -> dict:
        return {"theorem": self.theorem, "beta": self.beta, "gamma": self.gamma,
                "decrease_constant": self.decrease_constant, "window": list(self.window),
                "verified": self.verified, "first_violation": self.first_violation,
                "start_index": self.start_index, "checked": self.checked,
                "sum_sq": self.sum_sq, "sum_sq_bound": self.sum_sq_bound,
                "skipped": self.skipped}


def _check_same_system(tr: LyapunovTrace, cert: LyapunovCertificate):
    spec = tr.orbit.spec
    if spec.c != cert.c:
        raise ValueError(f"certificate built for c={cert.c}, orbit has c={spec.c}")
    bound = properties(spec.f).sector_bound
    if bound > cert.a:
        raise ValueError(f"orbit nonlinearity has sector bound {bound} > certificate a={cert.a}")


def verify_decrease(tr: LyapunovTrace, cert: LyapunovCertificate, tol: float = 1e-10,
                    start: int = 2, check_system: bool = True) -> VerificationReport:
    """Check V_{n+1} - V_n <= -K*y_n**2 + tol for every n >= ``start``.

    Also reports sum(y_n**2) over the checked range next to the telescoped
    bound V_start/K.  Pass ``check_system=False`` to audit a certificate
    against a system it was not built for.
    """
    if check_system:
        _check_same_system(tr, cert)
    k = cert.decrease_constant
    y = tr.orbit.values
    j0 = max(start - 2, 0)
    d = tr.deltas[j0:]
    yn = y[1 + j0:1 + j0 + len(d)]
    bad = np.nonzero(d > -k * yn * yn + tol)[0]
    first = int(bad[0]) + j0 + 2 if bad.size else None
    sum_sq = float(np.sum(yn * yn))
    v_start = float(tr.values[j0]) if j0 < len(tr.values) else 0.0
    return VerificationReport(cert.theorem, cert.beta, cert.gamma, k,
                              (cert.window.lo, cert.window.hi), first is None, first,
                              j0 + 2, int(len(d)), sum_sq, v_start / k)


def positive_tail_start(x_orbit: Trajectory) -> Optional[int]:
    """Smallest time index n0 with x_m > 0 for every m >= n0, or None."""
    x = x_orbit.values
    nonpos = np.nonzero(x <= 0.0)[0]
    if nonpos.size and nonpos[-1] == len(x) - 1:
        return None
    k = int(nonpos[-1]) + 1 if nonpos.size else 0
    return x_orbit.index(k)


def verify_orbit(cert: LyapunovCertificate, x_orbit: Trajectory,
                 tol: float = 1e-10) -> VerificationReport:
    """Verify ``cert`` along a level orbit.

    THM3 checks start at n0 + 2 where n0 opens the positive tail; orbits
    that are not eventually positive, or that hit the divergence guard, are
    reported as skipped.
    """
    if x_orbit.kind != X_ORBIT:
        raise ValueError("verify_orbit needs an x-orbit")

    def skipped(reason):
        return VerificationReport(cert.theorem, cert.beta, cert.gamma, cert.decrease_constant,
                                  (cert.window.lo, cert.window.hi), True, None, 0, 0, 0.0, 0.0,
                                  reason)

    if x_orbit.termination == DIVERGED:
        return skipped("orbit reached the divergence guard")
    start = 2
    if cert.theorem == THM3:
        n0 = positive_tail_start(x_orbit)
        if n0 is None:
            return skipped("no positive tail")
        start = max(n0 + 2, 2)
    y = difference_orbit(x_orbit)
    if len(y) < 3 or start - 2 >= len(y) - 2:
        return skipped("orbit too short")
    return verify_decrease(trace(cert, y), cert, tol, start)
