"""Dense two-phase simplex with Bland's anti-cycling rule.

Sized for the small, dense LPs this package solves by the thousand (D-family
witnesses, dual-norm hull distances, polyhedral projections).  Bland's rule
makes the pivot sequence, and therefore every reported certificate, a pure
function of the input.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..core import NumericalFailure

PIVOT_TOL = 1e-11
COST_TOL = 1e-11
FEAS_TOL = 1e-9


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


def _as_rows(M, N):
    if M is None:
        return np.zeros((0, N))
    M = np.asarray(M, dtype=float)
    return M.reshape(-1, N)


@dataclass
class LpProblem:
    """maximize ``c'z`` s.t. ``A_eq z = b_eq``, ``A_ub z <= b_ub``, ``lower <= z <= upper``.

    Variables without bounds are free.
    """

    c: np.ndarray
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    A_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        N = self.c.size
        self.A_eq = _as_rows(self.A_eq, N)
        self.A_ub = _as_rows(self.A_ub, N)
        self.b_eq = np.asarray(self.b_eq if self.b_eq is not None else [], dtype=float).reshape(-1)
        self.b_ub = np.asarray(self.b_ub if self.b_ub is not None else [], dtype=float).reshape(-1)
        self.lower = np.full(N, -np.inf) if self.lower is None else np.asarray(self.lower, dtype=float).reshape(N)
        self.upper = np.full(N, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float).reshape(N)
        if self.b_eq.size != self.A_eq.shape[0] or self.b_ub.size != self.A_ub.shape[0]:
            raise ValueError("constraint rows and right-hand sides disagree")
        data = [self.c, self.A_eq, self.A_ub, self.b_eq, self.b_ub]
        if not all(np.all(np.isfinite(d)) for d in data):
            raise ValueError("LP data must be finite")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound above upper bound")


@dataclass
class LpSolution:
    status: LpStatus
    value: float
    x: Optional[np.ndarray]
    certificate: Optional[np.ndarray] = field(default=None, repr=False)
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _Tableau:
    def __init__(self, T, basis):
        self.T = T
        self.basis = basis

    def pivot(self, i, j):
        T = self.T
        T[i] /= T[i, j]
        col = T[:, j].copy()
        col[i] = 0.0
        T -= np.outer(col, T[i])
        self.basis[i] = j

    def run(self, cost, allowed, max_iter):
        """Minimize ``cost`` over the current tableau.  Returns ('optimal'|'unbounded', col, iters)."""
        T = self.T
        ncol = T.shape[1] - 1
        for it in range(max_iter):
            cb = cost[self.basis]
            red = cost[:ncol] - cb @ T[:, :ncol]
            cand = np.flatnonzero((red < -COST_TOL) & allowed)
            if cand.size == 0:
                return "optimal", None, it
            j = int(cand[0])
            col = T[:, j]
            rows = np.flatnonzero(col > PIVOT_TOL)
            if rows.size == 0:
                return "unbounded", j, it
            ratios = T[rows, -1] / col[rows]
            rmin = ratios.min()
            ties = rows[ratios <= rmin + 1e-12 * max(1.0, abs(rmin))]
            i = int(min(ties, key=lambda k: self.basis[k]))
            self.pivot(i, j)
        raise NumericalFailure("simplex iteration limit reached")


def solve_lp(p: LpProblem) -> LpSolution:
    """Solve ``p`` exactly up to floating-point tolerance.

    Certificates: dual multipliers ``[w_eq, u_ub]`` with ``u >= 0`` and
    ``c = A_eq'w + A_ub'u`` on free directions when optimal; a recession ray
    in ``z`` when unbounded; phase-one multipliers when infeasible.
    """
    N = p.c.size
    lo, up = p.lower, p.upper

    # z = z0 + M v, v >= 0
    cols = []
    z0 = np.zeros(N)
    bound_rows = []
    for j in range(N):
        if np.isfinite(lo[j]):
            z0[j] = lo[j]
            cols.append((j, 1.0))
            if np.isfinite(up[j]):
                bound_rows.append((len(cols) - 1, up[j] - lo[j]))
        elif np.isfinite(up[j]):
            z0[j] = up[j]
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    V = len(cols)
    M = np.zeros((N, V))
    for k, (j, s) in enumerate(cols):
        M[j, k] = s

    G = p.A_ub @ M
    g = p.b_ub - p.A_ub @ z0
    if bound_rows:
        Gb = np.zeros((len(bound_rows), V))
        for r, (k, u) in enumerate(bound_rows):
            Gb[r, k] = 1.0
        G = np.vstack([G, Gb])
        g = np.concatenate([g, [u for _, u in bound_rows]])
    E = p.A_eq @ M
    e = p.b_eq - p.A_eq @ z0

    n_ub, n_eq = G.shape[0], E.shape[0]
    m = n_ub + n_eq
    # columns: v (V) | slacks (n_ub) | artificials (as needed)
    A_std = np.zeros((m, V + n_ub))
    A_std[:n_ub, :V] = G
    A_std[:n_ub, V:] = np.eye(n_ub)
    A_std[n_ub:, :V] = E
    h = np.concatenate([g, e])
    sign = np.where(h < 0, -1.0, 1.0)
    A_std *= sign[:, None]
    h = h * sign

    needs_art = [i for i in range(m) if i >= n_ub or sign[i] < 0]
    n_art = len(needs_art)
    ncol = V + n_ub + n_art
    T = np.zeros((m, ncol + 1))
    T[:, :V + n_ub] = A_std
    T[:, -1] = h
    basis = [0] * m
    for i in range(n_ub):
        basis[i] = V + i
    for k, i in enumerate(needs_art):
        T[i, V + n_ub + k] = 1.0
        basis[i] = V + n_ub + k
    tab = _Tableau(T, basis)
    full = T[:, :ncol].copy()
    kept = list(range(m))
    max_iter = 50 * (m + ncol) + 1000
    art = np.zeros(ncol, dtype=bool)
    art[V + n_ub:] = True
    iters = 0

    if n_art:
        cost1 = np.zeros(ncol)
        cost1[art] = 1.0
        _, _, it = tab.run(cost1, np.ones(ncol, dtype=bool), max_iter)
        iters += it
        infeas = float(cost1[tab.basis] @ tab.T[:, -1])
        scale = max(1.0, float(np.abs(h).max(initial=0.0)))
        if infeas > FEAS_TOL * scale:
            y = _basis_duals(full, kept, tab.basis, cost1)
            return LpSolution(LpStatus.INFEASIBLE, np.nan, None, y * sign, iters)
        # drive artificials out of the basis; drop redundant rows
        for i in range(m):
            if art[tab.basis[i]]:
                nz = np.flatnonzero(np.abs(tab.T[i, :V + n_ub]) > 1e-9)
                if nz.size:
                    tab.pivot(i, int(nz[0]))
                else:
                    kept.remove(i)
        if len(kept) < m:
            tab.T = tab.T[kept]
            tab.basis = [tab.basis[i] for i in kept]

    cost2 = np.zeros(ncol)
    cost2[:V] = -(p.c @ M)
    status, j, it = tab.run(cost2, ~art, max_iter)
    iters += it
    if status == "unbounded":
        dv = np.zeros(ncol)
        dv[j] = 1.0
        for i, bi in enumerate(tab.basis):
            dv[bi] -= tab.T[i, j]
        ray = M @ dv[:V]
        return LpSolution(LpStatus.UNBOUNDED, np.inf, None, ray, iters)

    # recompute the basic solution from the original data to shed pivot error
    B = full[np.ix_(kept, tab.basis)]
    xb = tab.T[:, -1]
    try:
        solved = np.linalg.solve(B, h[kept])
        if np.all(solved >= -1e-9 * max(1.0, float(np.abs(solved).max()))):
            xb = solved
    except np.linalg.LinAlgError:
        pass
    v = np.zeros(ncol)
    v[tab.basis] = np.maximum(xb, 0.0)
    z = z0 + M @ v[:V]
    y_std = _basis_duals(full, kept, tab.basis, cost2)
    cert = -y_std * sign
    # order as [eq rows, ub rows]; bound rows are internal
    cert = np.concatenate([cert[n_ub:], cert[:p.A_ub.shape[0]]])
    _check_primal(p, z)
    return LpSolution(LpStatus.OPTIMAL, float(p.c @ z), z, cert, iters)


def _basis_duals(full, kept, basis, cost):
    """Simplex multipliers ``y`` with ``B'y = c_B``, zero on dropped rows."""
    y = np.zeros(full.shape[0])
    B = full[np.ix_(kept, basis)]
    try:
        y[kept] = np.linalg.solve(B.T, cost[basis])
    except np.linalg.LinAlgError:
        y[kept] = np.linalg.lstsq(B.T, cost[basis], rcond=None)[0]
    return y


def _check_primal(p: LpProblem, z: np.ndarray, tol: float = 1e-8):
    viol = 0.0
    if p.A_ub.size:
        viol = max(viol, float(np.max(p.A_ub @ z - p.b_ub)))
    if p.A_eq.size:
        viol = max(viol, float(np.max(np.abs(p.A_eq @ z - p.b_eq))))
    viol = max(viol, float(np.max(p.lower - z, initial=0.0)), float(np.max(z - p.upper, initial=0.0)))
    if viol > tol:
        raise NumericalFailure(f"simplex solution violates constraints by {viol:.2e}")
