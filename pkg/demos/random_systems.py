"""Random systems: three routes to the global constant and the b^J identity.

Run with ``python3 demos/random_systems.py``.
"""
import numpy as np

from hoffman import FiniteSystem, clm_at, hof_at, hof_global, indicator_rhs

rng = np.random.default_rng(0)
for norm in ("l1", "l2", "linf"):
    A = rng.uniform(-1, 1, (6, 3))
    sys_ = FiniteSystem(A, norm=norm)
    g = hof_global(sys_, exhaustive=True)
    y = g.certificate
    print(f"[{norm}] hof_global {float(g.value):.10f}  routes {[round(float(v), 10) for v in g.routes.values()]}")
    print(f"       certificate sums to {y.sum():.10f}, ||A'y||_* = "
          f"{np.linalg.norm(A.T @ y, ord={'l1': np.inf, 'l2': 2, 'linf': 1}[norm]):.10f}")
    # b^J puts the attaining rows through the origin and the rest at 1;
    # the semilocal modulus there equals the global one
    bJ = indicator_rhs(sys_, g.subset.indices)
    print(f"       hof_at(b^J) {float(hof_at(sys_, bJ).value):.10f}, "
          f"clm at 0 {float(clm_at(sys_, bJ, np.zeros(3)).value):.10f}")
