"""Closed-form global attractivity and oscillation criteria.

All predicates compare doubles exactly.  Every inequality is strict except
the two equality clauses of the sign-preserving criterion (a = 1 - c with
c != 0, and a = d).  Callers probing a boundary must offset explicitly.

Applicability is decided from declared :class:`Flags` only.  Passing
``flags=None`` means "assume the hypotheses hold".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .nonlinearities import Flags, PropertyRecord, properties

__all__ = [
    "ATTRACTIVITY_IDS",
    "CriterionReport",
    "CriterionResult",
    "criterion_c1",
    "criterion_c2",
    "criterion_c3",
    "criterion_thm2",
    "criterion_thm3",
    "evaluate_all",
    "oscillation_band",
    "oscillation_iff",
    "oscillation_theorem",
    "thm3_l",
]

ATTRACTIVITY_IDS = ("C1", "C2", "C3", "THM2", "THM3")

PROVEN_ATTRACTING = "proven_attracting"
PROVEN_OSCILLATORY = "proven_oscillatory"
PROVEN_NONOSCILLATORY = "proven_nonoscillatory"
COUNTEREXAMPLE = "counterexample_regime"
UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class CriterionResult:
    id: str
    applicable: bool
    satisfied: bool
    thresholds: dict = field(default_factory=dict)
    boundary_note: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "applicable": self.applicable,
            "satisfied": self.satisfied,
            "thresholds": dict(self.thresholds),
            "boundary_note": self.boundary_note,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CriterionResult":
        return cls(d["id"], d["applicable"], d["satisfied"], dict(d["thresholds"]),
                   d.get("boundary_note"))


@dataclass(frozen=True)
class CriterionReport:
    a: float
    c: float
    results: tuple
    summary: str

    def get(self, cid: str) -> CriterionResult:
        for r in self.results:
            if r.id == cid:
                return r
        raise KeyError(cid)

    def to_dict(self) -> dict:
        return {"a": self.a, "c": self.c, "results": [r.to_dict() for r in self.results],
                "summary": self.summary}

    @classmethod
    def from_dict(cls, d: dict) -> "CriterionReport":
        return cls(d["a"], d["c"], tuple(CriterionResult.from_dict(r) for r in d["results"]),
                   d["summary"])


def _result(cid, applicable, condition, thresholds, note=None):
    return CriterionResult(cid, applicable, bool(applicable and condition), thresholds, note)


def criterion_c1(a: float, c: float, flags: Optional[Flags] = None) -> CriterionResult:
    """a < (1 - c)/2 for any f with |f(t)| <= a|t|."""
    applicable = flags is None or flags.globally_sectored
    bound = (1.0 - c) / 2.0
    return _result("C1", applicable, a < bound, {"bound": bound})


def criterion_c2(a: float, c: float, flags: Optional[Flags] = None) -> CriterionResult:
    """Sign-preserving f: a < max{b, 1 - c, d}, or a = 1 - c (c != 0), or a = d."""
    applicable = flags is None or (flags.sign_preserving and flags.globally_sectored)
    b = (1.0 - math.sqrt(1.0 - c)) ** 2
    d = (2.0 - c) / (3.0 - c)
    bound = max(b, 1.0 - c, d)
    note = None
    cond = a < bound
    if not cond and a == 1.0 - c and c != 0.0:
        cond, note = True, "equality clause a = 1 - c (c != 0)"
    elif not cond and a == d:
        cond, note = True, "equality clause a = d"
    elif not cond and a == b:
        note = "a = b: no equality clause covers this boundary"
    return _result("C2", applicable, cond, {"b": b, "d": d, "one_minus_c": 1.0 - c,
                                            "bound": bound}, note)


def criterion_c3(a: float, c: float, flags: Optional[Flags] = None) -> CriterionResult:
    """Nonnegative f: a < max{1 - c, c}."""
    applicable = flags is None or (flags.nonnegative and flags.globally_sectored)
    bound = max(1.0 - c, c)
    return _result("C3", applicable, a < bound, {"bound": bound})


def criterion_thm2(a: float, c: float, flags: Optional[Flags] = None) -> CriterionResult:
    """a < (1 + c)/2 for any f with |f(t)| <= a|t|; sharp."""
    applicable = flags is None or flags.globally_sectored
    bound = (1.0 + c) / 2.0
    note = None
    if a >= bound:
        note = ("sharp: f(t) = -a*t has a characteristic root <= -1 "
                "once a >= (1 + c)/2")
    return _result("THM2", applicable, a < bound, {"bound": bound}, note)


def thm3_l(a: float, c: float) -> float:
    return max(a / (a + c), a / (a + 1.0 - c))


def criterion_thm3(a: float, c: float, flags: Optional[Flags] = None) -> CriterionResult:
    """Nonnegative f: a^2 < (1 + c)/(2l) with l = max{a/(a+c), a/(a+1-c)}."""
    applicable = flags is None or (flags.nonnegative and flags.globally_sectored)
    if a <= 0.0:
        # f == 0: the equation is x' = c x, trivially attracting.
        return _result("THM3", applicable, True, {"l": 0.0, "rhs": math.inf})
    l = thm3_l(a, c)
    rhs = (1.0 + c) / (2.0 * l)
    return _result("THM3", applicable, a * a < rhs, {"l": l, "rhs": rhs})


def oscillation_band(c: float) -> tuple[float, float]:
    """Open interval of slopes at zero for which every solution oscillates."""
    s = math.sqrt(1.0 - c)
    return (1.0 - s) ** 2, (1.0 + s) ** 2


def oscillation_theorem(alpha_left: float, alpha_right: float, c: float,
                        flags: Optional[Flags] = None) -> CriterionResult:
    """Two-sided slope test: every solution oscillates if both one-sided
    liminfs of f(t)/t at 0 exceed the lower band edge.

    The liminfs only need to dominate some constants inside the open band,
    so a liminf at or above the upper edge is served by any interior point.
    """
    lo, hi = oscillation_band(c)
    applicable = flags is None or (flags.sign_preserving and flags.asymptotically_sectored)

    def pick(alpha):
        return alpha if alpha < hi else (lo + hi) / 2.0

    ok = alpha_left > lo and alpha_right > lo
    th = {"band_lo": lo, "band_hi": hi, "alpha_1": pick(alpha_left) if ok else alpha_left,
          "alpha_2": pick(alpha_right) if ok else alpha_right}
    return _result("OSC_BAND", applicable, ok, th)


def oscillation_iff(slope_at_zero: Optional[float], c: float,
                    flags: Optional[Flags] = None) -> CriterionResult:
    """Exact oscillation test for f with 0 < f(t)/t <= f'(0) < 1.

    ``satisfied`` is the verdict: True means oscillatory, False (when
    applicable) means nonoscillatory.  A divergent slope (f(t)/t -> inf at
    0) is oscillatory under the growth hypotheses alone.
    """
    lo, hi = oscillation_band(c)
    th = {"band_lo": lo, "band_hi": hi}
    if slope_at_zero is None:
        return _result("OSC_IFF", False, False, th)
    if math.isinf(slope_at_zero):
        applicable = flags is None or (flags.sign_preserving and flags.asymptotically_sectored)
        return _result("OSC_IFF", applicable, slope_at_zero > 0, th,
                       "divergent slope at zero")
    applicable = (0.0 < slope_at_zero < 1.0) and (
        flags is None or (flags.sign_preserving and flags.ratio_max_at_zero))
    note = "slope equals band_lo: nonoscillatory" if slope_at_zero == lo else None
    return _result("OSC_IFF", applicable, slope_at_zero > lo, th, note)


def evaluate_all(spec, a: Optional[float] = None) -> CriterionReport:
    """Run every criterion for a ``SystemSpec`` and summarise.

    ``a`` defaults to the nonlinearity's declared sector bound.
    """
    props: PropertyRecord = properties(spec.f)
    flags = props.flags
    c = spec.c
    a = props.sector_bound if a is None else a
    results = [
        criterion_c1(a, c, flags),
        criterion_c2(a, c, flags),
        criterion_c3(a, c, flags),
        criterion_thm2(a, c, flags),
        criterion_thm3(a, c, flags),
        oscillation_theorem(props.slope_left, props.slope_right, c, flags),
        oscillation_iff(props.slope_at_zero, c, flags),
    ]
    if spec.f.kind == "linear_negative" and a >= (1.0 + c) / 2.0:
        summary = COUNTEREXAMPLE
    elif any(r.satisfied for r in results if r.id in ATTRACTIVITY_IDS):
        summary = PROVEN_ATTRACTING
    elif any(r.satisfied for r in results[5:]):
        summary = PROVEN_OSCILLATORY
    elif results[6].applicable:
        summary = PROVEN_NONOSCILLATORY
    else:
        summary = UNRESOLVED
    return CriterionReport(a, c, tuple(results), summary)
