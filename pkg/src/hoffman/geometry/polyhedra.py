"""Polyhedral helpers: strict systems, projections, row spaces, vertices."""
from __future__ import annotations

import itertools
import math
from typing import List, Optional, Tuple

import numpy as np

from ..core import (DEFAULT_TOL_ACTIVE, FiniteSystem, IndexSubset, InfeasibleSystem, Modulus,
                    NormKind, NumericalFailure, SizeLimit)
from .lp import LpProblem, LpStatus, solve_lp

TOL_STRICT = 1e-8
TOL_RANK = 1e-10
SUBSET_CAP = 10**7
_CHUNK = 200_000


def strict_system_witness(sys: FiniteSystem, Tx, D, tol_strict: float = TOL_STRICT) -> Optional[np.ndarray]:
    """A ``d`` with ``a_t'd = 1`` on ``D`` and ``a_t'd < 1`` on ``Tx \\ D``, or None.

    Strictness means a slack above ``tol_strict``: the LP maximizes ``s``
    subject to ``a_t'd + s <= 1`` on the strict rows.
    """
    D = list(D)
    rest = sorted(set(Tx) - set(D))
    if not set(D) <= set(Tx):
        raise ValueError("D must be a subset of Tx")
    n = sys.n
    A_D = sys.A[D]
    if not rest:
        if not D:
            return np.zeros(n)
        d = np.linalg.lstsq(A_D, np.ones(len(D)), rcond=None)[0]
        if np.max(np.abs(A_D @ d - 1.0)) < tol_strict:
            return d
        return None
    c = np.zeros(n + 1)
    c[-1] = 1.0
    A_ub = np.hstack([sys.A[rest], np.ones((len(rest), 1))])
    A_eq = np.hstack([A_D, np.zeros((len(D), 1))]) if D else None
    upper = np.full(n + 1, np.inf)
    upper[-1] = 1.0
    sol = solve_lp(LpProblem(c, A_eq, np.ones(len(D)) if D else None, A_ub, np.ones(len(rest)),
                             upper=upper))
    if sol.optimal and sol.value > tol_strict:
        return sol.x[:n]
    return None


def strict_slack(sys: FiniteSystem, Tx, D, bound: Optional[float] = None) -> float:
    """Optimal slack ``s`` of the strict-system LP (``-inf`` if the equalities fail).

    With ``bound`` the witness is restricted to ``|d|_inf <= bound``.  On a
    grid, a strict system can stay consistent only through witnesses that
    blow up as the grid is refined; the bounded slack exposes that.
    """
    D = list(D)
    rest = sorted(set(Tx) - set(D))
    n = sys.n
    c = np.zeros(n + 1)
    c[-1] = 1.0
    upper = np.full(n + 1, np.inf)
    lower = np.full(n + 1, -np.inf)
    upper[-1] = 1.0
    if bound is not None:
        upper[:n] = bound
        lower[:n] = -bound
    A_eq = np.hstack([sys.A[D], np.zeros((len(D), 1))]) if D else None
    A_ub = np.hstack([sys.A[rest], np.ones((len(rest), 1))]) if rest else None
    sol = solve_lp(LpProblem(c, A_eq, np.ones(len(D)) if D else None, A_ub,
                             np.ones(len(rest)) if rest else None, lower=lower, upper=upper))
    return sol.value if sol.optimal else -np.inf


def feasible_point(sys: FiniteSystem, b) -> Optional[np.ndarray]:
    b = sys.check_rhs(b)
    sol = solve_lp(LpProblem(np.zeros(sys.n), A_ub=sys.A, b_ub=b))
    return sol.x if sol.optimal else None


def nnls(E, f, max_iter: Optional[int] = None, tol: float = 1e-12):
    """Lawson-Hanson active-set solver for ``min |E w - f|_2`` over ``w >= 0``.

    Returns ``(w, residual norm)``.
    """
    E = np.asarray(E, dtype=float)
    f = np.asarray(f, dtype=float)
    m, k = E.shape
    max_iter = max_iter or 3 * k + 50
    w = np.zeros(k)
    P = np.zeros(k, dtype=bool)
    scale = max(1.0, float(np.abs(E).max(initial=0.0)) * max(1.0, float(np.abs(f).max(initial=0.0))))
    for _ in range(max_iter):
        g = E.T @ (f - E @ w)
        cand = np.where(~P, g, -np.inf)
        j = int(np.argmax(cand))
        if not np.isfinite(cand[j]) or cand[j] <= tol * scale:
            break
        P[j] = True
        while True:
            idx = np.flatnonzero(P)
            z = np.zeros(k)
            z[idx] = np.linalg.lstsq(E[:, idx], f, rcond=None)[0]
            if np.all(z[idx] > 0):
                w = z
                break
            neg = idx[z[idx] <= 0]
            alpha = np.min(w[neg] / (w[neg] - z[neg]))
            w = w + alpha * (z - w)
            P &= w > tol
            w[~P] = 0.0
            if not P.any():
                break
    else:
        raise NumericalFailure("NNLS iteration limit reached")
    return w, float(np.linalg.norm(E @ w - f))


def _ldp(A, h):
    """Least-distance programming: min |u|_2 s.t. ``A u <= h`` (Lawson & Hanson).

    Returns ``(u, w)`` with multipliers ``w >= 0``, or ``(None, None)`` if
    the constraints are inconsistent.
    """
    m, n = A.shape
    E = np.vstack([-A.T, -h[None, :]])
    f = np.zeros(n + 1)
    f[-1] = 1.0
    w, _ = nnls(E, f)
    r = E @ w - f
    if abs(r[-1]) < 1e-13:
        return None, None
    u = -r[:n] / r[-1]
    return u, w / (-r[-1])


def project_to_polyhedron(sys: FiniteSystem, b, x) -> Tuple[Modulus, Optional[np.ndarray]]:
    """Distance in ``sys.norm`` from ``x`` to ``F(b)`` and a nearest point.

    ``(+inf, None)`` when ``F(b)`` is empty.
    """
    b = sys.check_rhs(b)
    x = sys.check_point(x)
    s = sys.A @ x - b
    scale = max(1.0, float(np.abs(b).max()), float(np.abs(x).max()))
    if s.max() <= 0:
        return Modulus.ZERO, x.copy()
    if sys.norm is NormKind.L2:
        z = _project_l2(sys.A, b, x, -s, scale)
        if z is None:
            return Modulus.INF, None
        return Modulus(float(np.linalg.norm(z - x))), z
    return _project_lp(sys, b, x, -s)


def _project_l2(A, b, x, h, scale):
    u, w = _ldp(A, h)
    if u is None:
        sol = solve_lp(LpProblem(np.zeros(A.shape[1]), A_ub=A, b_ub=b))
        if sol.status is LpStatus.INFEASIBLE:
            return None
        raise NumericalFailure("least-distance solver failed on a feasible polyhedron")
    z = x + u
    # polish on the active face found by NNLS, keeping it only if KKT holds
    act = np.flatnonzero(w > 1e-12 * max(1.0, w.max()))
    if act.size:
        Aa = A[act]
        lam = np.linalg.lstsq(Aa @ Aa.T, Aa @ x - b[act], rcond=None)[0]
        z2 = x - Aa.T @ lam
        if np.all(lam >= -1e-10) and np.max(A @ z2 - b) <= 1e-12 * scale:
            z = z2
    viol = float(np.max(A @ z - b))
    if viol > 1e-8 * scale:
        raise NumericalFailure(f"projection is infeasible by {viol:.2e}")
    return z


def project_l2_batch(A, b, X, tol: float = 1e-10) -> np.ndarray:
    """Euclidean distances from each row of ``X`` to ``{z : A z <= b}`` (``inf`` if empty).

    Points sharing an optimal face are solved together from that face's KKT
    system; a point is accepted only when its multipliers are nonnegative
    and the projected point is feasible, which certifies optimality.  Points
    no known face fits go through the least-distance solver, whose face is
    then added to the pool.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    out = np.full(len(X), np.nan)
    inside = (X @ A.T - b).max(axis=1) <= 0
    out[inside] = 0.0
    todo = np.flatnonzero(~inside)
    faces = []
    scale_b = max(1.0, float(np.abs(b).max()))
    while todo.size:
        i = todo[0]
        x = X[i]
        scale = max(scale_b, float(np.abs(x).max()))
        u, w = _ldp(A, b - A @ x)
        if u is None:
            out[todo] = np.inf
            break
        act = np.flatnonzero(w > 1e-12 * max(1.0, w.max()))
        out[i] = float(np.linalg.norm(_project_l2(A, b, x, b - A @ x, scale) - x))
        todo = todo[1:]
        if act.size == 0 or any(np.array_equal(act, f) for f in faces):
            continue
        faces.append(act)
        Aa = A[act]
        try:
            Minv = np.linalg.inv(Aa @ Aa.T)
        except np.linalg.LinAlgError:
            continue
        if not todo.size:
            break
        Xt = X[todo]
        lam = (Xt @ Aa.T - b[act]) @ Minv.T
        Z = Xt - lam @ Aa
        sc = np.maximum(scale_b, np.abs(Xt).max(axis=1))
        ok = (lam.min(axis=1) >= -tol * sc) & ((Z @ A.T - b).max(axis=1) <= 1e-12 * sc)
        out[todo[ok]] = np.linalg.norm(Z[ok] - Xt[ok], axis=1)
        todo = todo[~ok]
    return out


def _project_lp(sys, b, x, h):
    n = sys.n
    A = sys.A
    m = A.shape[0]
    if sys.norm is NormKind.L1:
        # vars u (free), s >= 0 ; minimize sum s
        c = np.concatenate([np.zeros(n), -np.ones(n)])
        A_ub = np.vstack([np.hstack([A, np.zeros((m, n))]),
                          np.hstack([np.eye(n), -np.eye(n)]),
                          np.hstack([-np.eye(n), -np.eye(n)])])
        lower = np.concatenate([np.full(n, -np.inf), np.zeros(n)])
    else:
        c = np.concatenate([np.zeros(n), [-1.0]])
        A_ub = np.vstack([np.hstack([A, np.zeros((m, 1))]),
                          np.hstack([np.eye(n), -np.ones((n, 1))]),
                          np.hstack([-np.eye(n), -np.ones((n, 1))])])
        lower = np.concatenate([np.full(n, -np.inf), [0.0]])
    b_ub = np.concatenate([h, np.zeros(2 * n)])
    sol = solve_lp(LpProblem(c, A_ub=A_ub, b_ub=b_ub, lower=lower))
    if sol.status is LpStatus.INFEASIBLE:
        return Modulus.INF, None
    if not sol.optimal:
        raise NumericalFailure(f"projection LP returned {sol.status.value}")
    u = sol.x[:n]
    z = x + u
    return Modulus(sys.norm(u)), z


def rank_and_rowspace(sys: FiniteSystem, tol_rank: float = TOL_RANK) -> Tuple[int, np.ndarray]:
    """Numerical rank of the row matrix and an orthonormal basis (n x r) of its row space."""
    _, S, Vt = np.linalg.svd(sys.A, full_matrices=False)
    if S.size == 0 or S[0] == 0:
        return 0, np.zeros((sys.n, 0))
    r = int(np.sum(S > tol_rank * S[0]))
    return r, Vt[:r].T.copy()


def _combinations(m, r):
    if r == 1:
        return np.arange(m)[:, None]
    if r == 2:
        i, j = np.triu_indices(m, 1)
        return np.stack([i, j], axis=1)
    it = itertools.chain.from_iterable(itertools.combinations(range(m), r))
    return np.fromiter(it, dtype=np.int64).reshape(-1, r)


def _independent_mask(M, combos, tol_rank):
    """Rows of ``combos`` whose selected rows of ``M`` are linearly independent."""
    out = np.empty(len(combos), dtype=bool)
    for s in range(0, len(combos), _CHUNK):
        block = M[combos[s:s + _CHUNK]]
        sv = np.linalg.svd(block, compute_uv=False)
        out[s:s + _CHUNK] = sv[:, -1] > tol_rank * np.maximum(sv[:, 0], np.finfo(float).tiny)
    return out


def independent_subset_array(sys: FiniteSystem, tol_rank: float = TOL_RANK,
                             cap: int = SUBSET_CAP) -> np.ndarray:
    """All rank(A)-subsets with independent rows, as a (k, r) index array."""
    r, _ = rank_and_rowspace(sys, tol_rank)
    if r == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if math.comb(sys.m, r) > cap:
        raise SizeLimit(f"C({sys.m},{r}) = {math.comb(sys.m, r)} subsets exceeds cap {cap}")
    combos = _combinations(sys.m, r)
    return combos[_independent_mask(sys.A, combos, tol_rank)]


def enumerate_independent_subsets(sys: FiniteSystem, tol_rank: float = TOL_RANK,
                                  cap: int = SUBSET_CAP) -> List[IndexSubset]:
    """Subsets ``J`` with ``rank A_J = rank A`` and ``{a_t, t in J}`` independent, lexicographic."""
    return [IndexSubset(tuple(row)) for row in independent_subset_array(sys, tol_rank, cap)]


def enumerate_vertices(sys: FiniteSystem, b, tol_rank: float = TOL_RANK,
                       cap: int = SUBSET_CAP) -> List[np.ndarray]:
    """Extreme points of ``F(b) ∩ span{a_t}``.

    Raises :class:`InfeasibleSystem` if ``F(b)`` is empty.
    """
    b = sys.check_rhs(b)
    if feasible_point(sys, b) is None:
        raise InfeasibleSystem("F(b) is empty")
    r, Q = rank_and_rowspace(sys, tol_rank)
    if r == 0:
        return [np.zeros(sys.n)]
    R = sys.A @ Q
    if math.comb(sys.m, r) > cap:
        raise SizeLimit(f"C({sys.m},{r}) candidate bases exceeds cap {cap}")
    combos = _combinations(sys.m, r)
    combos = combos[_independent_mask(R, combos, tol_rank)]
    scale = max(1.0, float(np.abs(b).max()))
    verts: List[np.ndarray] = []
    for s in range(0, len(combos), _CHUNK):
        cb = combos[s:s + _CHUNK]
        Y = np.linalg.solve(R[cb], b[cb][..., None])[..., 0]
        feas = np.max(Y @ R.T - b, axis=1) <= 1e-9 * np.maximum(scale, np.abs(Y).max(axis=1))
        for y in Y[feas]:
            if all(np.linalg.norm(y - v) >= 1e-7 * max(1.0, np.linalg.norm(y)) for v in verts):
                verts.append(y)
    return [Q @ y for y in verts]
