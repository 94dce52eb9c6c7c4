"""
Sweeping the parameter plane
============================

Run a small sweep for tanh and compare the proven regions with what the
simulations do.  Results are written as CSV next to this script.
"""
# %%
from collections import Counter
from pathlib import Path

from attractivity.sweep import InitialConditions, SweepConfig, export, run_sweep

cfg = SweepConfig(a_range=(0.05, 1.2, 12), c_range=(0.0, 0.9, 10),
                  nonlinearity_kind="tanh",
                  initial_conditions=InitialConditions(grid_k=3, random_count=8, seed=1))
result = run_sweep(cfg)

print(Counter(cell.summary for cell in result.cells))
print(Counter(cell.agreement for cell in result.cells))
print("violations:", len(result.violations))

# %%
out = Path(__file__).with_name("tanh_sweep.csv")
export(result, "csv", out)
print("wrote", out)
