"""Finite-orbit classification and characteristic roots of linear comparisons."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .criteria import oscillation_band
from .dynamics import CONVERGED, DIVERGED, Trajectory

__all__ = [
    "CharacteristicRoots",
    "ClassificationVerdict",
    "band_consistency",
    "characteristic_roots",
    "classify",
    "sign_changes",
]

OSCILLATORY, NONOSCILLATORY, UNDETERMINED = "oscillatory", "nonoscillatory", "undetermined"
CONVERGES, DIVERGES, MONOTONE_BOUNDED = "converges_to_zero", "diverges", "monotone_bounded"
_EPS = float(np.finfo(np.float64).eps)


def sign_changes(seq, zero_tol: float = 0.0) -> int:
    """Count strict sign alternations, ignoring entries with |v| <= zero_tol."""
    v = np.asarray(seq, dtype=np.float64)
    s = np.sign(v[np.abs(v) > zero_tol])
    return int(np.count_nonzero(s[1:] != s[:-1]))


@dataclass(frozen=True)
class ClassificationVerdict:
    oscillation: str
    limit_behavior: str
    lemma1_holds: Optional[bool]
    tail_start: int
    sign_changes: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def classify(traj: Trajectory, tail: Optional[int] = None,
             rel_zero_tol: float = 1e-13) -> ClassificationVerdict:
    """Operational verdict on one orbit from its final window.

    The tail is the last ``min(500, len/2)`` values.  Two or more sign
    changes in the tail read as oscillatory, none as nonoscillatory and a
    single one as undetermined.  Entries below ``rel_zero_tol`` times the
    tail's largest magnitude count as zero.
    """
    n = len(traj)
    t = min(500, n // 2) if tail is None else tail
    lim = {CONVERGED: CONVERGES, DIVERGED: DIVERGES}.get(traj.termination, UNDETERMINED)
    if t < 2 or n < t:
        return ClassificationVerdict(UNDETERMINED, lim, None, traj.index(max(n - 1, 0)), 0)
    x = traj.values[n - t:]
    scale = float(np.max(np.abs(x))) if np.all(np.isfinite(x)) else math.inf
    tol = rel_zero_tol * scale
    changes = sign_changes(x, tol)
    nonzero = np.abs(x) > tol
    if changes >= 2:
        osc = OSCILLATORY
    elif changes == 0 and nonzero.sum() >= 2:
        osc = NONOSCILLATORY
    else:
        osc = UNDETERMINED

    if lim == UNDETERMINED and np.all(np.isfinite(x)):
        dx = np.diff(x)
        if np.all(dx >= 0) or np.all(dx <= 0):
            lim = MONOTONE_BOUNDED

    lemma1 = None
    if osc == NONOSCILLATORY:
        xs = x[nonzero]
        lemma1 = bool(np.all(xs[:-1] * np.diff(xs) < 0))
    return ClassificationVerdict(osc, lim, lemma1, traj.index(n - t), changes)


@dataclass(frozen=True)
class CharacteristicRoots:
    """Roots of lambda^2 - p*lambda - q = 0, ordered by modulus descending."""

    mode: str
    p: float
    q: float
    roots: tuple
    modulus_max: float

    @property
    def real_positive(self) -> bool:
        return all(r.imag == 0.0 and r.real > 0.0 for r in self.roots)

    def residual(self) -> float:
        return max(abs(r * r - self.p * r - self.q) for r in self.roots)


def _disc(p: float, q: float) -> float:
    disc = p * p + 4.0 * q
    # A discriminant inside its own rounding error is a double root.
    if abs(disc) <= 8.0 * _EPS * (p * p + 4.0 * abs(q)):
        return 0.0
    return disc


def _quadratic(p: float, q: float) -> tuple:
    disc = _disc(p, q)
    if disc >= 0.0:
        s = math.sqrt(disc)
        big = (p + math.copysign(s, p)) / 2.0
        if big == 0.0:
            return complex(0.0), complex(0.0)
        return complex(big), complex(-q / big)
    s = math.sqrt(-disc) / 2.0
    return complex(p / 2.0, s), complex(p / 2.0, -s)


def characteristic_roots(mode: str, value: float, c: float) -> CharacteristicRoots:
    """Characteristic roots for a linear comparison equation.

    ``mode="theorem4"`` uses lambda^2 - (c + alpha)lambda + alpha with
    ``value = alpha``; ``mode="linear_negative"`` uses the polynomial of
    f(t) = -a*t, lambda^2 - (c - a)lambda - a, with ``value = a``.
    """
    if mode == "theorem4":
        p, q = c + value, -value
    elif mode == "linear_negative":
        p, q = c - value, value
    else:
        raise ValueError(f"unknown mode {mode!r}")
    r1, r2 = sorted(_quadratic(p, q), key=lambda z: (-abs(z), -z.real))
    return CharacteristicRoots(mode, p, q, (r1, r2), abs(r1))


def band_consistency(alpha: float, c: float) -> bool:
    """Roots real and positive iff alpha lies outside the open oscillation band."""
    roots = characteristic_roots("theorem4", alpha, c)
    if _disc(roots.p, roots.q) == 0.0:
        # Tangency: a double positive root sits exactly on a band edge.
        return True
    lo, hi = oscillation_band(c)
    outside = alpha <= lo or alpha >= hi
    return roots.real_positive == outside

