"""Dual-norm distance from the origin to the convex hull of finitely many points."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Modulus, NormKind, NumericalFailure
from .lp import LpProblem, solve_lp

WOLFE_TOL = 1e-12


@dataclass(frozen=True)
class HullDistanceResult:
    distance: Modulus
    weights: np.ndarray
    point: np.ndarray


def min_norm_point(P, tol: float = WOLFE_TOL, max_iter: int = 10_000):
    """Wolfe's algorithm for the Euclidean minimum-norm point of ``conv(P)``.

    Parameters
    ----------
    P : (k, n) array
        Points, one per row.

    Returns
    -------
    weights : (k,) array on the unit simplex
    x : (n,) array, ``weights @ P``
    """
    P = np.asarray(P, dtype=float)
    k = P.shape[0]
    sq = np.einsum("ij,ij->i", P, P)
    big = max(1.0, float(sq.max()))
    j0 = int(np.argmin(sq))
    S = [j0]
    lam = np.array([1.0])
    x = P[j0].copy()

    for _ in range(max_iter):
        # major cycle
        xx = x @ x
        scores = P @ x
        j = int(np.argmin(scores))
        if xx - scores[j] <= tol * big or j in S:
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        # minor cycles
        while True:
            Q = P[S]
            G = Q @ Q.T
            s = len(S)
            K = np.zeros((s + 1, s + 1))
            K[:s, :s] = G
            K[:s, s] = 1.0
            K[s, :s] = 1.0
            rhs = np.zeros(s + 1)
            rhs[s] = 1.0
            sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
            alpha = sol[:s]
            if np.all(alpha > tol):
                lam = alpha
                x = alpha @ Q
                break
            neg = alpha <= tol
            denom = lam[neg] - alpha[neg]
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(denom > 0, lam[neg] / denom, np.inf)
            theta = min(1.0, float(ratios.min()))
            lam = theta * alpha + (1 - theta) * lam
            lam[lam < tol] = 0.0
            keep = lam > 0
            if keep.all():
                # numerical stall; drop the smallest weight to make progress
                keep[int(np.argmin(lam))] = False
            S = [S[i] for i in range(s) if keep[i]]
            lam = lam[keep]
            lam /= lam.sum()
            x = lam @ P[S]
            if len(S) == 1:
                break
    else:
        raise NumericalFailure("Wolfe's algorithm did not terminate")

    w = np.zeros(k)
    w[S] = lam
    w = np.maximum(w, 0.0)
    w /= w.sum()
    return w, w @ P


def _lp_min_dual_norm(P, dual: NormKind):
    """``min_{w in simplex} |w @ P|_dual`` for the polyhedral duals l1 / linf."""
    k, n = P.shape
    if dual is NormKind.LINF:
        # vars: w (k) >= 0, tau free; maximize -tau
        c = np.concatenate([np.zeros(k), [-1.0]])
        A_ub = np.vstack([np.hstack([P.T, -np.ones((n, 1))]),
                          np.hstack([-P.T, -np.ones((n, 1))])])
        b_ub = np.zeros(2 * n)
        lower = np.concatenate([np.zeros(k), [-np.inf]])
    else:
        # vars: w (k) >= 0, s (n) >= 0; maximize -sum(s)
        c = np.concatenate([np.zeros(k), -np.ones(n)])
        A_ub = np.vstack([np.hstack([P.T, -np.eye(n)]),
                          np.hstack([-P.T, -np.eye(n)])])
        b_ub = np.zeros(2 * n)
        lower = np.zeros(k + n)
    A_eq = np.concatenate([np.ones(k), np.zeros(c.size - k)])[None, :]
    sol = solve_lp(LpProblem(c, A_eq, [1.0], A_ub, b_ub, lower=lower))
    if not sol.optimal:
        raise NumericalFailure(f"hull-distance LP returned {sol.status.value}")
    w = np.maximum(sol.x[:k], 0.0)
    w /= w.sum()
    return w, w @ P


def dual_distance_to_hull(points, norm) -> HullDistanceResult:
    """``d_*(0, conv(points))`` where ``*`` is the dual of ``norm``.

    An empty point set gives ``+inf``.
    """
    norm = NormKind.parse(norm)
    P = np.asarray(points, dtype=float)
    if P.size == 0:
        return HullDistanceResult(Modulus.INF, np.zeros(0), np.zeros(0))
    P = np.atleast_2d(P)
    dual = norm.dual
    if P.shape[0] == 1:
        w, x = np.ones(1), P[0].copy()
    elif dual is NormKind.L2:
        w, x = min_norm_point(P)
    else:
        w, x = _lp_min_dual_norm(P, dual)
    return HullDistanceResult(Modulus(dual(x)), w, x)


def segment_dual_distances(A, B, norm) -> np.ndarray:
    """Vectorized ``d_*(0, [a_i, b_i])`` for row pairs of ``A`` and ``B``.

    Exact: the dual norm restricted to a segment is convex and, for the
    polyhedral duals, piecewise linear, so its minimum sits at an endpoint
    or a breakpoint.
    """
    norm = NormKind.parse(norm)
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    D = B - A
    dual = norm.dual
    if dual is NormKind.L2:
        dd = np.einsum("ij,ij->i", D, D)
        with np.errstate(divide="ignore", invalid="ignore"):
            lam = np.where(dd > 0, -np.einsum("ij,ij->i", A, D) / dd, 0.0)
        lam = np.clip(lam, 0.0, 1.0)
        return np.linalg.norm(A + lam[:, None] * D, axis=1)

    n = A.shape[1]
    cands = [np.zeros(len(A)), np.ones(len(A))]
    with np.errstate(divide="ignore", invalid="ignore"):
        if dual is NormKind.L1:
            for i in range(n):
                cands.append(-A[:, i] / D[:, i])
        else:
            for i in range(n):
                for j in range(i, n):
                    cands.append((A[:, j] - A[:, i]) / (D[:, i] - D[:, j]))
                    cands.append(-(A[:, i] + A[:, j]) / (D[:, i] + D[:, j]))
    L = np.stack(cands, axis=1)
    L = np.clip(np.nan_to_num(L, nan=0.0, posinf=0.0, neginf=0.0), 0.0, 1.0)
    pts = A[:, None, :] + L[:, :, None] * D[:, None, :]
    vals = np.linalg.norm(pts, ord=dual.ord, axis=2)
    return vals.min(axis=1)
