"""
Probing the unproven gap
========================

For a nonnegative ramp response, look for orbits that fail to converge in
cells that no proven criterion covers.
"""
# %%
from attractivity.sweep import (InitialConditions, SweepConfig, dumps,
                                probe_conjecture)

cfg = SweepConfig(a_range=(0.5, 0.99, 8), c_range=(0.0, 0.4, 6),
                  nonlinearity_kind="ramp",
                  initial_conditions=InitialConditions(random_count=40, seed=11))
report = probe_conjecture("conjecture2", cfg)
print(f"{report.cells_in_gap} of {report.cells_total} cells in the gap, "
      f"{report.orbits_simulated} orbits, {report.reruns} reruns")
print("counterexample found:", report.counterexample_found)

# %%
# The report is plain JSON, so runs can be diffed.
print(dumps(report)[:300])
