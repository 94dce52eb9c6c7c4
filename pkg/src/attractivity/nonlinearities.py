"""Catalog of nonlinearities f with f(0) = 0 and their analytic metadata.

Each catalog entry is a frozen :class:`NonlinearitySpec`.  Metadata
(sector bound, sign structure, one-sided slopes at zero) is derived from
the closed form of the kind, never estimated from orbits.  The sampling
check :func:`verify_sector` exists to catch a wrong declaration, not to
replace it.
"""

from __future__ import annotations

import bisect
import math
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "KINDS",
    "Flags",
    "NonlinearitySpec",
    "PropertyRecord",
    "SectorReport",
    "evaluate",
    "parse",
    "properties",
    "verify_sector",
]

# Kind name -> integer code understood by the compiled orbit kernel.
KINDS = {
    "zero": 0,
    "linear_negative": 1,
    "linear_positive": 2,
    "scaled_tanh": 3,
    "sublinear_power": 4,
    "ramp": 5,
    "piecewise_linear": 6,
    "bounded_saturating": 7,
}

_TEXT_NAMES = {
    "zero": "zero",
    "linear_negative": "linneg",
    "linear_positive": "linpos",
    "scaled_tanh": "tanh",
    "sublinear_power": "sublinear",
    "ramp": "ramp",
    "piecewise_linear": "pwl",
    "bounded_saturating": "sat",
}
_FROM_TEXT = {v: k for k, v in _TEXT_NAMES.items()}
_FROM_TEXT.update({k: k for k in KINDS})
KIND_ALIASES = dict(_FROM_TEXT)

DIVERGENT = math.inf


@dataclass(frozen=True)
class Flags:
    """Sign and growth structure of f.

    ``asymptotically_sectored`` means |f(t)| <= |t| for all |t| beyond some
    threshold, the growth hypothesis the oscillation results need.
    ``ratio_max_at_zero`` means f is differentiable at 0 and
    0 < f(t)/t <= f'(0) for every t != 0.
    """

    sign_preserving: bool
    nonnegative: bool
    globally_sectored: bool
    asymptotically_sectored: bool = False
    ratio_max_at_zero: bool = False

    def to_dict(self) -> dict:
        return {
            "sign_preserving": self.sign_preserving,
            "nonnegative": self.nonnegative,
            "globally_sectored": self.globally_sectored,
            "asymptotically_sectored": self.asymptotically_sectored,
            "ratio_max_at_zero": self.ratio_max_at_zero,
        }


@dataclass(frozen=True)
class PropertyRecord:
    sector_bound: float
    t0: float
    slope_at_zero: Optional[float]
    slope_left: float
    slope_right: float
    flags: Flags

    @property
    def slope_divergent(self) -> bool:
        return self.slope_at_zero is not None and math.isinf(self.slope_at_zero)

    def to_dict(self) -> dict:
        def enc(v):
            if v is None:
                return None
            return "divergent" if math.isinf(v) else v

        return {
            "sector_bound": self.sector_bound,
            "t0": self.t0,
            "slope_at_zero": enc(self.slope_at_zero),
            "slope_left": enc(self.slope_left),
            "slope_right": enc(self.slope_right),
            "flags": self.flags.to_dict(),
        }


@dataclass(frozen=True)
class NonlinearitySpec:
    """One nonlinearity from the catalog.

    Only the parameters relevant to ``kind`` are used: ``a`` for the linear,
    tanh, ramp and saturating kinds, ``lam`` for ``sublinear_power``,
    ``cap`` for ``bounded_saturating`` and ``points`` (strictly increasing
    ``(t, f(t))`` pairs) for ``piecewise_linear``.
    """

    kind: str
    a: float = 0.0
    lam: float = 0.5
    cap: float = 1.0
    points: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown nonlinearity kind {self.kind!r}")
        for name in ("a", "lam", "cap"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.kind in ("linear_negative", "linear_positive", "scaled_tanh",
                         "ramp", "bounded_saturating") and self.a < 0:
            raise ValueError("a must be nonnegative")
        if self.kind == "sublinear_power" and not 0 < self.lam < 1:
            raise ValueError("sublinear_power needs lambda in (0, 1)")
        if self.kind == "bounded_saturating" and self.cap <= 0:
            raise ValueError("cap must be positive")
        if self.kind == "piecewise_linear":
            pts = tuple((float(t), float(v)) for t, v in self.points)
            object.__setattr__(self, "points", pts)
            if len(pts) < 2:
                raise ValueError("piecewise_linear needs at least two breakpoints")
            ts = [t for t, _ in pts]
            if any(t1 <= t0 for t0, t1 in zip(ts, ts[1:])):
                raise ValueError("breakpoints must be strictly increasing in t")
            if not all(math.isfinite(t) and math.isfinite(v) for t, v in pts):
                raise ValueError("breakpoints must be finite")
            if 0.0 not in ts:
                # Carry the origin explicitly so values near 0 are computed without
                # cancellation; it must already lie on the interpolant.
                v = self(0.0)
                scale = max(abs(x) for p in pts for x in p)
                if abs(v) > 1e-12 * scale:
                    raise ValueError("piecewise_linear interpolant must pass through (0, 0)")
                pts = tuple(sorted(pts + ((0.0, 0.0),)))
                object.__setattr__(self, "points", pts)
            elif dict(pts)[0.0] != 0.0:
                raise ValueError("piecewise_linear interpolant must pass through (0, 0)")

    # -- evaluation -----------------------------------------------------

    def __call__(self, t: float) -> float:
        k = self.kind
        if k == "scaled_tanh":
            return self.a * math.tanh(t)
        if k == "linear_negative":
            return -self.a * t
        if k == "linear_positive":
            return self.a * t
        if k == "ramp":
            return self.a * t if t > 0.0 else 0.0
        if k == "sublinear_power":
            if t > 0.0:
                return t ** self.lam
            if t < 0.0:
                return -((-t) ** self.lam)
            return 0.0
        if k == "bounded_saturating":
            return min(self.cap, max(-self.cap, self.a * t))
        if k == "piecewise_linear":
            ts = [p[0] for p in self.points]
            i = min(max(bisect.bisect_right(ts, t) - 1, 0), len(ts) - 2)
            (t0, v0), (t1, v1) = self.points[i], self.points[i + 1]
            slope = (v1 - v0) / (t1 - t0)
            # Anchor at the nearer endpoint.
            if t - t0 <= t1 - t:
                return v0 + slope * (t - t0)
            return v1 + slope * (t - t1)
        return 0.0

    def with_a(self, a: float) -> "NonlinearitySpec":
        if self.kind in ("zero", "sublinear_power", "piecewise_linear"):
            raise ValueError(f"{self.kind} has no sector parameter a")
        return NonlinearitySpec(self.kind, a=a, lam=self.lam, cap=self.cap)

    def kernel_args(self):
        """(code, params, xs, ys) for the compiled orbit kernel."""
        params = np.array([self.a, self.lam, self.cap], dtype=np.float64)
        if self.kind == "piecewise_linear":
            xs = np.array([p[0] for p in self.points], dtype=np.float64)
            ys = np.array([p[1] for p in self.points], dtype=np.float64)
        else:
            xs = ys = np.zeros(2, dtype=np.float64)
        return KINDS[self.kind], params, xs, ys

    # -- text form ------------------------------------------------------

    def to_text(self) -> str:
        name = _TEXT_NAMES[self.kind]
        if self.kind == "zero":
            return name
        if self.kind == "sublinear_power":
            return f"{name}:lambda={self.lam!r}"
        if self.kind == "bounded_saturating":
            return f"{name}:a={self.a!r},cap={self.cap!r}"
        if self.kind == "piecewise_linear":
            return name + ":" + ";".join(f"({t!r},{v!r})" for t, v in self.points)
        return f"{name}:a={self.a!r}"

    def __str__(self) -> str:
        return self.to_text()


_PAIR = re.compile(r"\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)")


def parse(text: str) -> NonlinearitySpec:
    """Parse the compact form, e.g. ``tanh:a=0.8`` or ``pwl:(-1,-0.5);(0,0);(1,0.5)``."""
    head, _, body = text.strip().partition(":")
    kind = _FROM_TEXT.get(head.strip().lower())
    if kind is None:
        raise ValueError(f"unknown nonlinearity {head!r} in {text!r}")
    if kind == "piecewise_linear":
        chunks = [s for s in body.split(";") if s.strip()]
        pts = []
        for chunk in chunks:
            m = _PAIR.fullmatch(chunk.strip())
            if m is None:
                raise ValueError(f"bad breakpoint {chunk!r}")
            pts.append((float(m.group(1)), float(m.group(2))))
        return NonlinearitySpec(kind, points=tuple(pts))
    kwargs = {}
    for item in filter(None, (s.strip() for s in body.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"expected key=value, got {item!r}")
        key = {"lambda": "lam", "l": "lam"}.get(key.strip(), key.strip())
        if key not in ("a", "lam", "cap"):
            raise ValueError(f"unknown parameter {key!r}")
        kwargs[key] = float(val)
    if kind in ("linear_negative", "linear_positive", "scaled_tanh", "ramp",
                "bounded_saturating") and "a" not in kwargs:
        raise ValueError(f"{head} requires a=")
    if kind == "sublinear_power" and "lam" not in kwargs:
        raise ValueError("sublinear requires lambda=")
    return NonlinearitySpec(kind, **kwargs)


def evaluate(spec: NonlinearitySpec, t: float) -> float:
    return spec(t)


def _pwl_properties(spec: NonlinearitySpec) -> PropertyRecord:
    pts = spec.points
    ts = [p[0] for p in pts]
    slopes = [(v1 - v0) / (t1 - t0) for (t0, v0), (t1, v1) in zip(pts, pts[1:])]
    m_left, m_right = slopes[0], slopes[-1]

    # Segment index used on each side of 0, with the same clipping as __call__.
    i = min(max(bisect.bisect_right(ts, 0.0) - 1, 0), len(ts) - 2)
    s_right = slopes[i]
    if 0.0 in ts:
        j = ts.index(0.0)
        s_left = slopes[min(max(j - 1, 0), len(slopes) - 1)]
    else:
        s_left = s_right

    # f is linear between consecutive candidates, so endpoint checks suffice.
    cands = sorted(set(ts) | {0.0, ts[0] - 1.0, ts[-1] + 1.0})
    vals = [spec(t) for t in cands]
    ratios = [v / t for t, v in zip(cands, vals) if t != 0.0]
    bound = max([abs(r) for r in ratios] + [abs(m_left), abs(m_right)])

    sign_ok = all(t * v >= 0.0 for t, v in zip(cands, vals)) and m_left >= 0 and m_right >= 0
    nonneg = all(v >= 0.0 for v in vals) and m_left <= 0 and m_right >= 0
    smooth = s_left == s_right
    ratio_max = (smooth and s_right > 0
                 and all(0.0 < r <= s_right for r in ratios)
                 and 0.0 <= m_left <= s_right and 0.0 <= m_right <= s_right)
    # The tail ratio is monotone and tends to |m|; at |m| = 1 it must approach from below.
    asym = all(abs(m) < 1.0 or (abs(m) == 1.0 and abs(r) <= 1.0)
               for m, r in ((m_left, ratios[0]), (m_right, ratios[-1])))
    flags = Flags(sign_ok, nonneg, True, asym, ratio_max)
    return PropertyRecord(bound, 0.0, s_right if smooth else None, s_left, s_right, flags)


def properties(spec: NonlinearitySpec) -> PropertyRecord:
    """Analytic metadata of ``spec`` computed from its closed form."""
    k, a = spec.kind, spec.a
    if k == "zero":
        return PropertyRecord(0.0, 0.0, 0.0, 0.0, 0.0, Flags(True, True, True, True, False))
    if k == "linear_negative":
        return PropertyRecord(a, 0.0, -a, -a, -a,
                              Flags(a == 0, a == 0, True, a <= 1, False))
    if k == "linear_positive":
        return PropertyRecord(a, 0.0, a, a, a, Flags(True, a == 0, True, a <= 1, a > 0))
    if k == "scaled_tanh":
        # |a tanh t| <= a <= |t| once |t| >= a, whatever the size of a.
        return PropertyRecord(a, 0.0, a, a, a, Flags(True, a == 0, True, True, a > 0))
    if k == "sublinear_power":
        # |t|^lam <= |t| exactly when |t| >= 1; the ratio blows up at 0.
        return PropertyRecord(1.0, 1.0, DIVERGENT, DIVERGENT, DIVERGENT,
                              Flags(True, False, False, True, False))
    if k == "ramp":
        return PropertyRecord(a, 0.0, 0.0 if a == 0 else None, 0.0, a,
                              Flags(True, True, True, a <= 1, False))
    if k == "bounded_saturating":
        return PropertyRecord(a, 0.0, a, a, a, Flags(True, a == 0, True, True, a > 0))
    return _pwl_properties(spec)


@dataclass(frozen=True)
class SectorReport:
    bound: float
    t0: float
    global_pass: bool
    global_max_ratio: float
    global_witness: Optional[float]
    asymptotic_pass: bool
    asymptotic_max_ratio: float
    asymptotic_witness: Optional[float]
    samples: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def sample_grid(samples: int = 4096, extent: float = 1e6, smallest: float = 1e-9) -> np.ndarray:
    """Symmetric log-spaced grid, ``samples`` magnitudes per sign, 0 excluded."""
    mags = np.logspace(math.log10(smallest), math.log10(extent), samples)
    return np.concatenate([-mags[::-1], mags])


def verify_sector(spec: NonlinearitySpec, samples: int = 4096, extent: float = 1e6,
                  bound: Optional[float] = None, t0: Optional[float] = None,
                  tol: float = 1e-12) -> SectorReport:
    """Sample |f(t)|/|t| and check it against the declared sector bound.

    The global claim is checked on the whole grid and, separately, the
    asymptotic claim on |t| >= t0.  A failing claim carries the grid point
    of largest ratio as its witness.
    """
    if samples < 100:
        raise ValueError("samples must be at least 100")
    props = properties(spec)
    bound = props.sector_bound if bound is None else bound
    t0 = props.t0 if t0 is None else t0
    ts = sample_grid(samples, extent)
    ratios = np.array([abs(spec(float(t))) for t in ts]) / np.abs(ts)

    def check(mask):
        if not mask.any():
            return True, 0.0, None
        r = ratios[mask]
        k = int(np.argmax(r))
        worst = float(r[k])
        ok = worst <= bound + tol
        return ok, worst, None if ok else float(ts[mask][k])

    g_ok, g_max, g_wit = check(np.ones_like(ts, dtype=bool))
    a_ok, a_max, a_wit = check(np.abs(ts) >= t0)
    return SectorReport(bound, t0, g_ok, g_max, g_wit, a_ok, a_max, a_wit, 2 * samples)
