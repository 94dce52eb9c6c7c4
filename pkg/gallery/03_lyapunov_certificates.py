"""
Checking a Lyapunov certificate along an orbit
==============================================

Build a certificate for a sector-bounded response, then watch the energy
drop along a simulated orbit.
"""
# %%
import numpy as np

from attractivity.dynamics import SystemSpec, difference_orbit, simulate
from attractivity.lyapunov import make_certificate, trace, verify_decrease, window_thm2
from attractivity.nonlinearities import parse

a, c = 0.6, 0.4
print("feasible beta/gamma window:", window_thm2(a, c))
cert = make_certificate(a, c, theorem=2, ratio_choice=0.5)
print(f"beta={cert.beta:.4f} gamma={cert.gamma} decrease constant={cert.decrease_constant:.4f}")

# %%
spec = SystemSpec(c, parse(f"tanh:a={a}"))
y = difference_orbit(simulate(spec, 8.0, -9.0))
tr = trace(cert, y)
print("first energies:", np.round(tr.values[:6], 4))
report = verify_decrease(tr, cert)
print("verified:", report.verified, "over", report.checked, "steps")
print(f"sum of y^2 = {report.sum_sq:.4f} <= bound {report.sum_sq_bound:.4f}")

# %%
# For nonnegative responses a second certificate reaches past a = 1.
cert3 = make_certificate(1.0, 0.5, theorem=3)
print("gamma/beta window:", tuple(cert3.window))
