"""Random instances and independent oracles built on scipy.

The oracles never call the package's kernels, so they stay independent of
the code under test; only the instance generators use it.
"""
import itertools

import numpy as np
from scipy.optimize import linprog, minimize

from hoffman import FiniteSystem, enumerate_vertices

NORMS = ("l1", "l2", "linf")
DUAL_ORD = {"l1": np.inf, "l2": 2, "linf": 1}


def random_system(rng, n, m, norm="l2"):
    return FiniteSystem(rng.uniform(-1, 1, size=(m, n)), norm=norm)


def random_feasible(rng, n, m, norm="l2"):
    """System with a Slater point ``x0``: ``b = A x0 + positive slack``."""
    sys_ = random_system(rng, n, m, norm)
    x0 = rng.uniform(-1, 1, n)
    b = sys_.A @ x0 + rng.uniform(0.05, 1.0, m)
    return sys_, b, x0


def hull_distance_oracle(P, norm):
    """``min ||sum l_i p_i||_*`` over the simplex, by scipy (LP for l1/linf duals, SLSQP for l2)."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    k, n = P.shape
    dual = DUAL_ORD[norm]
    if dual == 2:
        best = np.inf
        starts = [np.full(k, 1.0 / k)] + [np.eye(k)[i] for i in range(k)]
        for l0 in starts:
            res = minimize(lambda l: float(np.sum((l @ P) ** 2)), l0, jac=lambda l: 2 * P @ (l @ P),
                           bounds=[(0, 1)] * k,
                           constraints=[{"type": "eq", "fun": lambda l: l.sum() - 1,
                                         "jac": lambda l: np.ones(k)}],
                           method="SLSQP", options={"ftol": 1e-16, "maxiter": 500})
            lam = np.clip(res.x, 0, None)
            lam /= lam.sum()
            best = min(best, float(np.linalg.norm(lam @ P)))
        return best
    if dual == np.inf:
        # min s  s.t. -s <= (P'l)_j <= s
        c = np.r_[np.zeros(k), 1.0]
        A_ub = np.vstack([np.c_[P.T, -np.ones(n)], np.c_[-P.T, -np.ones(n)]])
        b_ub = np.zeros(2 * n)
    else:
        # min sum u  s.t. -u <= P'l <= u
        c = np.r_[np.zeros(k), np.ones(n)]
        A_ub = np.vstack([np.c_[P.T, -np.eye(n)], np.c_[-P.T, -np.eye(n)]])
        b_ub = np.zeros(2 * n)
    nv = len(c)
    A_eq = np.r_[np.ones(k), np.zeros(nv - k)][None, :]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0],
                  bounds=[(0, None)] * nv, method="highs")
    return float(res.fun)


def in_hull_oracle(P, q, tol=1e-9):
    """Is ``q`` in ``conv P``?  Feasibility LP via scipy."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    k = len(P)
    res = linprog(np.zeros(k), A_eq=np.vstack([P.T, np.ones(k)]), b_eq=np.r_[q, 1.0],
                  bounds=[(0, None)] * k, method="highs")
    return res.status == 0


def projection_oracle(A, b, x, norm="l2"):
    """``d(x, {z : Az <= b})`` by scipy (SLSQP for l2, LP for l1/linf)."""
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    if norm == "l2":
        z0 = x.copy()
        res = minimize(lambda z: 0.5 * float(np.sum((z - x) ** 2)), z0, jac=lambda z: z - x,
                       constraints=[{"type": "ineq", "fun": lambda z: b - A @ z, "jac": lambda z: -A}],
                       method="SLSQP", options={"ftol": 1e-15, "maxiter": 1000})
        return float(np.linalg.norm(res.x - x))
    if norm == "linf":
        c = np.r_[np.zeros(n), 1.0]
        A_ub = np.vstack([np.c_[A, np.zeros(m)],
                          np.c_[np.eye(n), -np.ones(n)], np.c_[-np.eye(n), -np.ones(n)]])
        b_ub = np.r_[b, x, -x]
        bounds = [(None, None)] * n + [(0, None)]
    else:
        c = np.r_[np.zeros(n), np.ones(n)]
        A_ub = np.vstack([np.c_[A, np.zeros((m, n))],
                          np.c_[np.eye(n), -np.eye(n)], np.c_[-np.eye(n), -np.eye(n)]])
        b_ub = np.r_[b, x, -x]
        bounds = [(None, None)] * n + [(0, None)] * n
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    return float(res.fun)


def exhaustive_oracle(A, norm):
    """Max over all row subsets of the inverse hull distance, by the scipy hull oracle."""
    A = np.asarray(A, dtype=float)
    best = 0.0
    for size in range(1, len(A) + 1):
        for J in itertools.combinations(range(len(A)), size):
            d = hull_distance_oracle(A[list(J)], norm)
            if d > 1e-9:
                best = max(best, 1.0 / d)
    return best


def fine_hull_grid(p, q, norm, steps=1_000_001):
    """Brute-force ``min ||l p + (1-l) q||_*`` on a uniform grid of ``l``."""
    lam = np.linspace(0, 1, steps)[:, None]
    return float(np.linalg.norm(lam * p + (1 - lam) * q, ord=DUAL_ORD[norm], axis=1).min())


def degenerate_instance(rng, norm):
    """A system with a point ``x2`` where several rows (possibly a zero row) are active."""
    n = int(rng.integers(2, 4))
    k = int(rng.integers(n, n + 3))  # active rows at x2
    extra = int(rng.integers(1, 5))
    x2 = rng.uniform(-1, 1, n)
    A = rng.uniform(-1, 1, (k + extra, n))
    if rng.random() < 0.3:
        A[rng.integers(0, k)] = 0.0  # a zero row, active at every point
    b = A @ x2
    b[k:] += rng.uniform(0.1, 1.0, extra)
    return FiniteSystem(A, norm=norm), b, x2


def nested_pair(rng, norm):
    """``x1`` the midpoint of the vertex ``x2`` and another feasible point, so T(x1) ⊆ T(x2)."""
    sys_, b, x2 = degenerate_instance(rng, norm)
    verts = enumerate_vertices(sys_, b)
    z = verts[int(rng.integers(len(verts)))]
    if rng.random() < 0.5:
        z = z + 0.5 * rng.uniform(-1, 1, sys_.n)
        if np.max(sys_.A @ z - b) > 0:
            z = verts[0]
    x1 = 0.5 * (x2 + z)
    return sys_, b, x1, x2
