"""Compiled orbit loops.

The nonlinearity formulas here must stay operation-for-operation identical
to ``NonlinearitySpec.__call__`` so compiled and interpreted evaluation
agree bit for bit.
"""

import math

import numpy as np
from numba import njit

HORIZON, DIVERGED, CONVERGED = 0, 1, 2


@njit(cache=True)
def f_eval(code, p, xs, ys, t):
    a = p[0]
    if code == 3:
        return a * math.tanh(t)
    if code == 1:
        return -a * t
    if code == 2:
        return a * t
    if code == 5:
        return a * t if t > 0.0 else 0.0
    if code == 4:
        if t > 0.0:
            return t ** p[1]
        if t < 0.0:
            return -((-t) ** p[1])
        return 0.0
    if code == 7:
        return min(p[2], max(-p[2], a * t))
    if code == 6:
        n = xs.shape[0]
        i = np.searchsorted(xs, t, side="right") - 1
        if i < 0:
            i = 0
        if i > n - 2:
            i = n - 2
        slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
        if t - xs[i] <= xs[i + 1] - t:
            return ys[i] + slope * (t - xs[i])
        return ys[i + 1] + slope * (t - xs[i + 1])
    return 0.0


@njit(cache=True)
def run_orbit(code, p, xs, ys, c, v0, v1, difference, horizon, bound, tol, window):
    """Iterate from (v0, v1); returns (values, termination code).

    ``difference`` selects the first-difference recurrence
    y' = c*y + f(y) - f(y_prev) instead of x' = c*x + f(x - x_prev).
    """
    out = np.empty(horizon + 2)
    out[0] = v0
    out[1] = v1
    run = 0
    for k in range(2):
        v = out[k]
        if not abs(v) <= bound:
            return out[:k + 1], DIVERGED
        run = run + 1 if abs(v) <= tol else 0
    if run >= window:
        return out[:2], CONVERGED
    for n in range(2, horizon + 2):
        prev = out[n - 2]
        cur = out[n - 1]
        if difference:
            nxt = c * cur + f_eval(code, p, xs, ys, cur) - f_eval(code, p, xs, ys, prev)
        else:
            nxt = c * cur + f_eval(code, p, xs, ys, cur - prev)
        out[n] = nxt
        if not abs(nxt) <= bound:
            return out[:n + 1], DIVERGED
        if abs(nxt) <= tol:
            run += 1
            if run >= window:
                return out[:n + 1], CONVERGED
        else:
            run = 0
    return out, HORIZON
