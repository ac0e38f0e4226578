"""The unit box: global, semilocal and pointwise moduli side by side.

Run with ``python3 demos/box_benchmark.py``.
"""
import numpy as np

from hoffman import box_system, chain_check, clm_at, hof_at, hof_global, mc_ratio_sup, uniform_sampler

box = box_system()
b = np.ones(4)

# the global constant is attained by a pair of orthogonal rows
g = hof_global(box, exhaustive=True)
print(f"hof_global            {float(g.value):.12f}  (sqrt 2 = {np.sqrt(2):.12f})")
print(f"  attaining rows      {g.subset.indices}")
print(f"  dual certificate    {np.round(g.certificate, 6)}")
print(f"  routes              {[float(v) for v in g.routes.values()]}")

# at b = 1 the feasible set is the square [-1, 1]^2 and the corners carry the modulus
print(f"hof_at(b=1)           {float(hof_at(box, b).value):.12f}")
for x in ([0.0, 0.0], [1.0, 0.0], [1.0, 1.0]):
    print(f"  clm at {x}  {float(clm_at(box, b, x).value):.6f}")

# sampling d(x, F) / ||(Ax - b)+|| only ever reaches the value from below
mc = mc_ratio_sup(box, b, uniform_sampler(3.0), 100_000, seed=1)
print(f"Monte Carlo ratio     {float(mc.value):.6f} from {mc.n_samples} samples")

rep = chain_check(box, b, N=500, seed=0)
print(f"chain check passed, max boundary clm {float(rep.max_boundary_clm):.6f}")
