"""
Oscillation below and above the band
=====================================

For tanh with c = 0.75 the lower band edge is 0.25.  A gain just above it
gives sign-changing orbits; just below it they settle without crossing zero.
"""
# %%
from attractivity.analysis import characteristic_roots, classify
from attractivity.criteria import oscillation_band
from attractivity.dynamics import SystemSpec, simulate
from attractivity.nonlinearities import parse

c = 0.75
print("band:", oscillation_band(c))

for a in (0.2, 0.3):
    verdict = classify(simulate(SystemSpec(c, parse(f"tanh:a={a}")), 1.0, 0.9))
    roots = characteristic_roots("theorem4", a, c)
    print(f"a={a}: {verdict.oscillation}, sign changes={verdict.sign_changes}, "
          f"roots={roots.roots}")

# %%
# A response with infinite slope at zero always oscillates.
for c in (0.0, 0.5, 0.9):
    v = classify(simulate(SystemSpec(c, parse("sublinear:lambda=0.5")), 2.0, 1.0))
    print(f"sublinear, c={c}: {v.oscillation}")
