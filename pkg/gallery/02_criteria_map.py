"""
Which criteria hold where
=========================

Print a coarse text map of the (a, c) plane showing the strongest
attractivity criterion available at each point.
"""
# %%
import numpy as np

from attractivity.criteria import (criterion_c1, criterion_c2, criterion_thm2,
                                   criterion_thm3)

a_values = np.linspace(0.05, 1.2, 24)
c_values = np.linspace(0.0, 0.95, 12)


def symbol(a, c):
    if criterion_c1(a, c).satisfied:
        return "1"
    if criterion_c2(a, c).satisfied:
        return "2"
    if criterion_thm2(a, c).satisfied:
        return "S"
    if criterion_thm3(a, c).satisfied:
        return "N"  # only for nonnegative responses
    return "."


# %%
# Rows are c (top is largest), columns are a.
for c in c_values[::-1]:
    print(f"c={c:4.2f} " + "".join(symbol(a, c) for a in a_values))
print(" " * 7 + f"a from {a_values[0]:.2f} to {a_values[-1]:.2f}")
