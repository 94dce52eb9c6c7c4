import json

import numpy as np
import pytest
from scipy.optimize import brentq

from attractivity.criteria import criterion_thm2, criterion_thm3
from attractivity.dynamics import (
    HORIZON_REACHED,
    SimulationGuards,
    SystemSpec,
    Trajectory,
    difference_orbit,
    simulate,
)
from attractivity.lyapunov import (
    InfeasibleWindow,
    LyapunovCertificate,
    Window,
    make_certificate,
    positive_tail_start,
    trace,
    verify_decrease,
    verify_orbit,
    window_thm2,
    window_thm3,
)
from attractivity.nonlinearities import parse


def decrease_a(r, a, c):
    """Decrease constant of the sector certificate with gamma = 1, beta = r."""
    return -a * a - r * r * (1 - c) ** 2 + r * (1 - c * c)


def bisection_window(a, c):
    peak = (1 - c * c) / (2 * (1 - c) ** 2)
    return (brentq(decrease_a, 0.0, peak, args=(a, c), xtol=1e-15),
            brentq(decrease_a, peak, 1e6, args=(a, c), xtol=1e-15))


def test_window_thm2_examples():
    lo, hi = window_thm2(0.5, 0.5)
    olo, ohi = bisection_window(0.5, 0.5)
    assert lo == pytest.approx(olo, abs=1e-12) and hi == pytest.approx(ohi, abs=1e-12)
    assert lo == pytest.approx(0.381966, abs=1e-6) and hi == pytest.approx(2.618034, abs=1e-6)
    assert window_thm2(0.75, 0.5) is None
    lo, hi = window_thm2(0.1, 0.0)
    assert lo == pytest.approx((1 - 0.96 ** 0.5) / 2, abs=1e-15)
    assert hi == pytest.approx((1 + 0.96 ** 0.5) / 2, abs=1e-15)


@pytest.mark.parametrize("a,c", [(0.05, 0.0), (0.3, 0.2), (0.6, 0.5), (0.7, 0.9), (0.97, 0.95)])
def test_window_thm2_endpoints_are_roots(a, c):
    win = window_thm2(a, c)
    for r in win:
        assert abs(-a * a - r * r * (1 - c) ** 2 + r * (1 - c * c)) <= 1e-12
    for r, o in zip(win, bisection_window(a, c)):
        assert r == pytest.approx(o, rel=1e-9)


def test_window_thm3_examples():
    lo, hi = window_thm3(1.0, 0.5)
    assert lo == pytest.approx(2 / 3, abs=1e-12) and hi == pytest.approx(0.75, abs=1e-12)
    assert window_thm3(1.06, 0.5) is None
    lo, hi = window_thm3(0.2, 0.5)
    assert lo == pytest.approx(2 * 0.5 * 0.2 / 0.7, abs=1e-15)
    assert hi == pytest.approx(18.75, abs=1e-12)


def test_windows_agree_with_criteria_on_grid():
    for a in np.linspace(0.01, 1.3, 120):
        for c in np.linspace(0.0, 0.99, 120):
            assert (window_thm2(a, c) is not None) == criterion_thm2(a, c).satisfied
            assert (window_thm3(a, c) is not None) == criterion_thm3(a, c).satisfied


def test_make_certificate_examples():
    cert = make_certificate(0.5, 0.5, "THM2")
    assert cert.beta == pytest.approx(1.5, abs=1e-15) and cert.gamma == 1.0
    assert cert.decrease_constant == pytest.approx(0.3125, abs=1e-15)

    cert = make_certificate(1.0, 0.5, "THM3")
    assert cert.beta == 1.0
    assert cert.gamma == pytest.approx(17 / 24, abs=1e-15)
    assert cert.decrease_constant == pytest.approx(1 / 24, abs=1e-15)

    with pytest.raises(InfeasibleWindow):
        make_certificate(0.75, 0.5, "THM2")
    with pytest.raises(InfeasibleWindow):
        make_certificate(1.06, 0.5, 3)


def test_certificate_invariants_hold_across_window():
    for choice in (0.01, 0.3, 0.5, 0.99):
        cert = make_certificate(0.6, 0.4, 2, choice)
        assert cert.window.lo < cert.beta / cert.gamma < cert.window.hi
        assert cert.decrease_constant > 0
        cert = make_certificate(0.9, 0.6, 3, choice)
        assert cert.window.lo < cert.gamma / cert.beta < cert.window.hi
        assert cert.decrease_constant > 0


def test_ratio_choice_validated():
    with pytest.raises(ValueError):
        Window(0.0, 1.0).point(1.0)


def test_trace_examples():
    spec = SystemSpec(0.5, parse("zero"))
    cert = make_certificate(0.5, 0.5, 2)
    tr = trace(cert, Trajectory(np.zeros(6), "y-orbit", HORIZON_REACHED, spec))
    assert np.all(tr.values == 0) and np.all(tr.deltas == 0)
    assert verify_decrease(tr, cert).verified

    forged = LyapunovCertificate("THM2", 0.5, 0.5, 2.0, 1.0, 0.1, Window(0.1, 3.0))
    tr = trace(forged, Trajectory(np.array([0.3, 1.0, 0.5]), "y-orbit", HORIZON_REACHED, spec))
    assert tr.values[0] == 2.0


def test_trace_decrease_along_tanh_orbit():
    spec = SystemSpec(0.5, parse("tanh:a=0.5"))
    cert = make_certificate(0.5, 0.5, 2)
    y = difference_orbit(simulate(spec, 4.0, -6.0))
    tr = trace(cert, y)
    yn = y.values[1:1 + len(tr.deltas)]
    assert np.all(tr.deltas <= -cert.decrease_constant * yn ** 2 + 1e-10)
    assert np.all(tr.values >= 0)
    rep = verify_decrease(tr, cert)
    assert rep.verified and rep.first_violation is None
    assert rep.sum_sq <= rep.sum_sq_bound + 1e-10


def test_forged_certificate_violation_reported():
    spec = SystemSpec(0.5, parse("linneg:a=0.8"))
    guards = SimulationGuards(divergence_bound=1e6)
    y = difference_orbit(simulate(spec, 0.0, 1.0, guards))
    forged = LyapunovCertificate("THM2", 0.8, 0.5, 10.0, 1.0, 0.1, Window(9.0, 11.0))
    rep = verify_decrease(trace(forged, y), forged)
    assert not rep.verified
    assert rep.first_violation >= 2


def test_mismatched_system_rejected():
    spec = SystemSpec(0.3, parse("tanh:a=0.5"))
    cert = make_certificate(0.5, 0.5, 2)
    y = difference_orbit(simulate(spec, 1.0, 2.0))
    with pytest.raises(ValueError):
        verify_decrease(trace(cert, y), cert)
    spec = SystemSpec(0.5, parse("tanh:a=0.7"))
    y = difference_orbit(simulate(spec, 1.0, 2.0))
    with pytest.raises(ValueError):
        verify_decrease(trace(cert, y), cert)


@pytest.mark.parametrize("f,a,c", [("ramp", 1.0, 0.5), ("ramp", 0.9, 0.45), ("linpos", 0.95, 0.6),
                                   ("pwl", 1.02, 0.5)])
def test_thm3_certificate_on_positive_tail(f, a, c):
    text = {"ramp": f"ramp:a={a}", "linpos": f"linpos:a={a}",
            "pwl": f"pwl:(-1,0);(0,0);(1,{a});(2,{a})"}[f]
    spec = SystemSpec(c, parse(text))
    cert = make_certificate(a, c, 3)
    rng = np.random.default_rng(11)
    checked = 0
    for x0, x1 in rng.uniform(-10, 10, size=(30, 2)):
        traj = simulate(spec, x0, x1)
        rep = verify_orbit(cert, traj)
        assert rep.verified, (x0, x1, rep)
        if rep.skipped is None:
            checked += 1
            assert rep.start_index >= positive_tail_start(traj) + 2
            assert rep.sum_sq <= rep.sum_sq_bound + 1e-10
    assert checked > 0


def test_positive_tail_start():
    spec = SystemSpec(0.5, parse("zero"))
    t = Trajectory(np.array([1.0, -1.0, 2.0, 3.0, 0.5]), "x-orbit", HORIZON_REACHED, spec)
    assert positive_tail_start(t) == 2
    t = Trajectory(np.array([1.0, -1.0]), "x-orbit", HORIZON_REACHED, spec)
    assert positive_tail_start(t) is None


def test_verify_orbit_skips_divergent():
    spec = SystemSpec(0.5, parse("linneg:a=0.74"))
    cert = make_certificate(0.74, 0.5, 2)
    traj = simulate(spec, 0.0, 3.0, SimulationGuards(divergence_bound=2.0))
    assert traj.termination == "diverged"
    rep = verify_orbit(cert, traj)
    assert rep.skipped


def test_report_json_fields():
    cert = make_certificate(0.5, 0.5, 2)
    rep = verify_orbit(cert, simulate(SystemSpec(0.5, parse("tanh:a=0.5")), 1.0, 2.0))
    d = json.loads(json.dumps(rep.to_dict()))
    assert {"theorem", "beta", "gamma", "decrease_constant", "window", "verified",
            "first_violation"} <= set(d)
    assert json.loads(json.dumps(cert.to_dict()))["window"] == [cert.window.lo, cert.window.hi]
