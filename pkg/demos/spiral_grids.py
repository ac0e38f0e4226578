"""A continuous system on a grid: calmness stays put, the Hoffman constant blows up.

The builtin ``example-4-3`` has rows ``t cos t x1 + t sin t x2 <= t`` for
``t`` in ``[0, pi]`` plus two extra rows.  Run with
``python3 demos/spiral_grids.py``.
"""
import math

import numpy as np

from hoffman import builtin, clm_at, clm_sampling, hof_global_grid

c = builtin("example-4-3")

# calmness at (1, -2) only sees the two extra rows, on every grid
print("step        rows   clm(1,-2)       hof_global_grid")
for step in (0.5, 0.1, 0.01, 0.001):
    fsys, b = c.discretize(step)
    clm = float(clm_at(fsys, b, [1.0, -2.0]).value)
    hof = float(hof_global_grid(c, step).value)
    print(f"{step:<10g}  {fsys.m:5d}  {clm:.12f}  {hof:12.4f}")
print(f"sqrt 5 = {math.sqrt(5):.12f}")

# near (1, 0) the rows around t = 0 turn almost parallel; approaching
# vertically keeps x1 <= 1 inactive and the sampled modulus grows like r
X = [(1.0, 1.0 / r) for r in (10, 100, 1000, 10_000)]
res = clm_sampling(c, None, [1.0, 0.0], X)
print("clm estimates along (1, 1/r):", np.round(res.values, 3).tolist())

# along the arc (1 + 1/r)(cos 1/r, sin 1/r) the row x1 <= 1 dominates instead
X = [(1 + 1 / r) * np.array([math.cos(1 / r), math.sin(1 / r)]) for r in (10, 100, 1000, 10_000)]
res = clm_sampling(c, None, [1.0, 0.0], X)
print("clm estimates along the arc:  ", np.round(res.values, 3).tolist())
