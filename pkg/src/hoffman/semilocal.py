"""Semi-local Hoffman modulus ``Hof F(b)`` and its sampling cross-checks.

The exact value is the largest calmness modulus over the extreme points of
``F(b)`` intersected with the row space.  Two independent lower estimates
come from sampling infeasible points: the inverse hull distance of the
maximizing gradients, and the raw ratio ``d(x, F(b)) / [f_b(x)]_+``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .calmness import CalmnessReport, EmptySamplerWarning, _hull_inverse, clm_at
from .core import DEFAULT_TOL_ACTIVE, FiniteSystem, HoffmanError, Modulus, NormKind, _scale
from .geometry import (TOL_RANK, TOL_STRICT, enumerate_vertices, project_l2_batch,
                       project_to_polyhedron)
from .geometry.polyhedra import SUBSET_CAP, _project_l2

Sampler = Callable[[np.random.Generator, int], np.ndarray]


class ChainViolation(HoffmanError, AssertionError):
    """A sampled quantity exceeded the exact modulus; carries the sample."""

    def __init__(self, message, sample=None):
        super().__init__(message)
        self.sample = sample


@dataclass(frozen=True)
class SamplingEstimate:
    value: Modulus
    n_samples: int
    n_used: int
    best_point: Optional[np.ndarray] = None


@dataclass(frozen=True)
class SemiLocalReport:
    value: Modulus
    candidates: Tuple[Tuple[np.ndarray, CalmnessReport], ...]
    attaining_point: np.ndarray
    sampling: Dict[str, SamplingEstimate] = field(default_factory=dict)


def uniform_sampler(radius: float = 3.0, center=None) -> Sampler:
    """Uniform points in the box of half-width ``radius`` around ``center`` (default origin)."""

    def draw(rng, size, n=None):
        c = np.zeros(n) if center is None else np.asarray(center, dtype=float)
        return c + rng.uniform(-radius, radius, size=(size, c.size))

    draw.needs_dim = center is None
    return draw


def _draw(sampler, rng, N, n):
    if getattr(sampler, "needs_dim", False):
        X = sampler(rng, N, n)
    elif callable(sampler):
        X = sampler(rng, N)
    else:
        X = np.asarray(sampler, dtype=float)[:N]
    return np.atleast_2d(np.asarray(X, dtype=float)).reshape(-1, n)


def hof_at(sys: FiniteSystem, b, samples: int = 0, seed: int = 0,
           tol_active: float = DEFAULT_TOL_ACTIVE, tol_strict: float = TOL_STRICT,
           tol_rank: float = TOL_RANK, cap: int = SUBSET_CAP) -> SemiLocalReport:
    """``Hof F(b)`` as the max of ``clm_at`` over the extreme points of ``F(b) ∩ span{a_t}``.

    With ``samples > 0`` both sampling estimators are also run, on a box
    twice the size of the vertex cloud, and stored under ``sampling``.
    """
    b = sys.check_rhs(b)
    verts = enumerate_vertices(sys, b, tol_rank, cap)
    cands = []
    best, arg = -1.0, verts[0]
    for v in verts:
        rep = clm_at(sys, b, v, tol_active, tol_strict)
        cands.append((v, rep))
        if rep.value > best:
            best, arg = float(rep.value), v
    sampling = {}
    if samples > 0:
        R = 2.0 * max(1.0, max(float(np.abs(v).max()) for v in verts))
        smp = uniform_sampler(R)
        sampling["gradient"] = hof_at_sampling(sys, b, smp, samples, seed, tol_active)
        sampling["ratio"] = mc_ratio_sup(sys, b, smp, samples, seed)
    return SemiLocalReport(Modulus(best), tuple(cands), arg, sampling)


def hof_at_sampling(sys: FiniteSystem, b, sampler, N: int, seed: int = 0,
                    tol_active: float = DEFAULT_TOL_ACTIVE) -> SamplingEstimate:
    """Max over infeasible samples of ``d_*(0, conv{a_t : t maximizes a_t'x - b_t})^-1``.

    A lower bound for ``Hof F(b)``; exact ties are rare under continuous
    sampling, so a looser ``tol_active`` lets near-corner samples count.
    """
    b = sys.check_rhs(b)
    rng = np.random.default_rng(seed)
    X = _draw(sampler, rng, N, sys.n)
    S = X @ sys.A.T - b
    f = S.max(axis=1)
    out = f > 0
    if not out.any():
        warnings.warn("no sample violates the system; estimate is 0", EmptySamplerWarning,
                      stacklevel=2)
        return SamplingEstimate(Modulus.ZERO, len(X), 0)
    Xo, So, fo = X[out], S[out], f[out]
    scale = np.maximum(1.0, np.maximum(float(np.abs(b).max()), np.linalg.norm(Xo, ord=sys.norm.ord, axis=1)))
    mask = So >= (fo - tol_active * scale)[:, None]
    patterns, first = np.unique(mask, axis=0, return_index=True)
    best, where = 0.0, None
    for pat, i in zip(patterns, first):
        v = _hull_inverse(sys, tuple(int(j) for j in np.flatnonzero(pat)))
        if v > best:
            best, where = v, Xo[i]
    return SamplingEstimate(Modulus(best), len(X), int(out.sum()), where)


def mc_ratio_sup(sys: FiniteSystem, b, sampler, N: int, seed: int = 0) -> SamplingEstimate:
    """Max of ``d(x, F(b)) / [f_b(x)]_+`` over samples, with ``0/0 = 0``."""
    b = sys.check_rhs(b)
    rng = np.random.default_rng(seed)
    X = _draw(sampler, rng, N, sys.n)
    f = (X @ sys.A.T - b).max(axis=1)
    idx = np.flatnonzero(f > 0)
    if not idx.size:
        return SamplingEstimate(Modulus.ZERO, len(X), 0)
    if sys.norm is NormKind.L2:
        d = project_l2_batch(sys.A, b, X[idx])
    else:
        d = np.array([float(project_to_polyhedron(sys, b, X[i])[0]) for i in idx])
    ratios = d / f[idx]
    k = int(np.argmax(ratios))
    best, where = float(ratios[k]), X[idx[k]].copy()
    return SamplingEstimate(Modulus(best), len(X), len(idx), where)


def indicator_rhs(sys: FiniteSystem, J) -> np.ndarray:
    """``b_t = 0`` for ``t`` in ``J`` and 1 otherwise.

    With ``J`` the maximizing subset of the global constant, ``Hof F`` of
    this right-hand side is attained at the origin.
    """
    b = np.ones(sys.m)
    b[list(J)] = 0.0
    return b


def boundary_sampler(sys: FiniteSystem, b, rng: np.random.Generator, N: int,
                     vertices: Optional[List[np.ndarray]] = None) -> np.ndarray:
    """Random boundary points of ``F(b)``.

    A random convex combination of vertices plus a random recession
    direction gives an interior-or-boundary point, which is pushed along a
    random direction until the first constraint becomes active.
    """
    b = sys.check_rhs(b)
    if vertices is None:
        vertices = enumerate_vertices(sys, b)
    V = np.array(vertices)
    A = sys.A
    zeros = np.zeros(sys.m)
    out = []
    tries = 0
    while len(out) < N:
        tries += 1
        if tries > 50 * N + 100:
            break  # no boundary (every row is zero)
        w = rng.dirichlet(np.ones(len(V)))
        p = w @ V
        g = rng.standard_normal(sys.n)
        u = _project_l2(A, zeros, g, -(A @ g), 1.0) if np.max(A @ g) > 0 else g
        if u is not None:
            p = p + rng.exponential() * u
        v = rng.standard_normal(sys.n)
        for direction in (v, -v):
            rate = A @ direction
            pos = rate > 1e-12 * max(1.0, float(np.abs(rate).max()))
            if pos.any():
                tau = np.min((b[pos] - A[pos] @ p) / rate[pos])
                out.append(p + max(tau, 0.0) * direction)
                break
    return np.array(out).reshape(-1, sys.n)


@dataclass(frozen=True)
class ChainReport:
    hof: Modulus
    max_boundary_clm: Modulus
    ratio: SamplingEstimate
    n_boundary: int
    n_interior: int
    passed: bool = True


def chain_check(sys: FiniteSystem, b, boundary=None, N: int = 1000, seed: int = 0,
                mc_samples: int = 10_000, mc_sampler=None, tol: float = 1e-8,
                tol_active: float = DEFAULT_TOL_ACTIVE) -> ChainReport:
    """Cross-check the exact ``Hof F(b)`` against calmness and sampled ratios.

    Checks that calmness at every sampled boundary point (and at the
    extreme points on the boundary) stays below the vertex maximum, that the Monte Carlo ratio does too, and that sampled
    interior points have calmness 0.  Raises :class:`ChainViolation` with
    the offending sample otherwise.
    """
    b = sys.check_rhs(b)
    rep = hof_at(sys, b, tol_active=tol_active)
    hof = float(rep.value)
    verts = [v for v, _ in rep.candidates]
    if max(float(c.value) for _, c in rep.candidates) != hof:
        raise ChainViolation("vertex maximum differs from the reported value")
    rng = np.random.default_rng(seed)
    pts = boundary(sys, b, rng, N) if callable(boundary) else (
        boundary_sampler(sys, b, rng, N, verts) if boundary is None else np.asarray(boundary))
    pts = np.asarray(pts, dtype=float).reshape(-1, sys.n)
    # extreme points lying on the boundary are boundary points too
    on_bd = [v for v in verts if np.max(sys.A @ v - b) >= -1e-9 * _scale(sys, b, v)]
    if on_bd:
        pts = np.vstack([pts, on_bd])
    best = 0.0
    for x in pts:
        c = float(clm_at(sys, b, x, tol_active).value)
        if c > hof + tol:
            raise ChainViolation(f"boundary calmness {c} exceeds {hof}", sample=x)
        best = max(best, c)
    n_int = 0
    V = np.array(verts)
    for _ in range(min(N, 200)):
        p = rng.dirichlet(np.ones(len(V))) @ V
        s = sys.A @ p - b
        if s.max() < -1e-6 * _scale(sys, b, p):
            n_int += 1
            c = float(clm_at(sys, b, p, tol_active).value)
            if c != 0.0:
                raise ChainViolation(f"interior point has calmness {c}", sample=p)
    if mc_sampler is None:
        R = 2.0 * max(1.0, float(np.abs(V).max()))
        mc_sampler = uniform_sampler(R)
    ratio = mc_ratio_sup(sys, b, mc_sampler, mc_samples, seed)
    if ratio.value > hof + tol:
        raise ChainViolation(f"Monte Carlo ratio {float(ratio.value)} exceeds {hof}",
                             sample=ratio.best_point)
    return ChainReport(rep.value, Modulus(best), ratio, len(pts), n_int)
