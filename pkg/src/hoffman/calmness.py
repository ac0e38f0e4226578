"""Calmness modulus ``clm F(b, x)`` of the feasible-set mapping.

At a feasible ``x`` the modulus is the largest ``d_*(0, conv{a_t, t in D})^-1``
over the family of active subsets ``D`` that some direction ``d`` puts on the
hyperplane ``a'd = 1`` while keeping the other active rows strictly below it.
Outside the feasible set, the same hull distance taken over the maximizing
rows gives a lower estimate that is sampled along sequences approaching ``x``.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from .core import (DEFAULT_TOL_ACTIVE, FiniteSystem, IndexSubset, Modulus, SizeLimit,
                   active_set, argmax_set, residual)
from .geometry import TOL_STRICT, dual_distance_to_hull, strict_system_witness

MAX_ACTIVE = 24


class EmptySamplerWarning(UserWarning):
    """No sample had a positive residual; the estimate is ``sup(empty) = 0``."""


@dataclass(frozen=True)
class DFamily:
    point: np.ndarray
    active: IndexSubset
    members: Tuple[IndexSubset, ...]

    def __contains__(self, D) -> bool:
        key = tuple(D)
        return any(m.indices == key for m in self.members)

    def keys(self):
        return {m.indices for m in self.members}


@dataclass(frozen=True)
class CalmnessReport:
    value: Modulus
    attaining: IndexSubset
    end_set: Tuple[np.ndarray, ...]
    family: DFamily


@lru_cache(maxsize=8192)
def _members(sys: FiniteSystem, T: tuple, tol_strict: float) -> Tuple[IndexSubset, ...]:
    nonzero = [t for t in T if np.any(sys.A[t] != 0)]
    out = []
    for size in range(len(nonzero) + 1):
        for D in itertools.combinations(nonzero, size):
            d = strict_system_witness(sys, T, D, tol_strict)
            if d is not None:
                out.append(IndexSubset(D, certificate=d))
    out.sort(key=lambda s: s.indices)
    return tuple(out)


@lru_cache(maxsize=65536)
def _hull_inverse(sys: FiniteSystem, D: tuple) -> float:
    return float(dual_distance_to_hull(sys.A[list(D)], sys.norm).distance.inverse())


def d_family(sys: FiniteSystem, b, x, tol_active: float = DEFAULT_TOL_ACTIVE,
             tol_strict: float = TOL_STRICT) -> DFamily:
    """All ``D ⊆ T(x)`` whose strict system ``a_t'd = 1 (D), a_t'd < 1 (T(x) \\ D)`` is consistent.

    The empty set is always a member (witness ``d = 0``).  Members are in
    lexicographic order and carry their witness as certificate.
    """
    x = sys.check_point(x)
    T = active_set(sys, b, x, tol_active)
    if len(T) > MAX_ACTIVE:
        raise SizeLimit(f"{len(T)} active rows; the D-family is limited to {MAX_ACTIVE}")
    return DFamily(x.copy(), T, _members(sys, T.indices, float(tol_strict)))


def clm_at(sys: FiniteSystem, b, x, tol_active: float = DEFAULT_TOL_ACTIVE,
           tol_strict: float = TOL_STRICT) -> CalmnessReport:
    """Calmness modulus at a feasible point by the D-family formula.

    For a grid discretization of a continuous system this is the modulus of
    the discretized polyhedral system only.
    """
    fam = d_family(sys, b, x, tol_active, tol_strict)
    best, arg = 0.0, IndexSubset(())
    hulls = []
    for D in fam.members:
        if not D.indices:
            continue
        hulls.append(sys.A[list(D.indices)].copy())
        v = _hull_inverse(sys, D.indices)
        if v > best:
            best, arg = v, D
    return CalmnessReport(Modulus(best), arg, tuple(hulls), fam)


def end_set_finite(sys: FiniteSystem, b, x, tol_active: float = DEFAULT_TOL_ACTIVE,
                   tol_strict: float = TOL_STRICT) -> List[np.ndarray]:
    """Vertex lists of ``conv{a_t, t in D}`` for the nonempty family members.

    Their union is the end set of the subdifferential of the residual at ``x``.
    """
    return list(clm_at(sys, b, x, tol_active, tol_strict).end_set)


@dataclass(frozen=True)
class ClmSamplingResult:
    """Per-sample lower estimates and their running maximum.

    ``indices`` are positions in the input sequence of the samples that
    were used (positive residual); the estimate is the last running max.
    """

    estimate: Modulus
    values: np.ndarray
    running_max: np.ndarray
    indices: np.ndarray


def radial_sampler(x_bar, radii=(1e-1, 1e-2, 1e-3, 1e-4), per_radius: int = 16,
                   seed: int = 0) -> np.ndarray:
    """Points ``x_bar + rho * u`` for unit directions ``u``, ordered by shrinking radius."""
    x_bar = np.asarray(x_bar, dtype=float).reshape(-1)
    rng = np.random.default_rng(seed)
    pts = []
    for rho in radii:
        U = rng.standard_normal((per_radius, x_bar.size))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        pts.append(x_bar + rho * U)
    return np.vstack(pts)


def _outside_value(system, b, x, tol_active):
    """``(f(x), d_*(0, conv of gradients at the maximizing rows)^-1)``."""
    if isinstance(system, FiniteSystem):
        f = residual(system, b, x)
        if f <= 0:
            return f, 0.0
        J = argmax_set(system, b, x, tol_active)
        return f, _hull_inverse(system, J.indices)
    f = system.residual(x)
    if f <= 0:
        return f, 0.0
    grads = np.array([a for _, a in system.argmax_set(x, tol_active)])
    return f, float(dual_distance_to_hull(grads, system.norm).distance.inverse())


def clm_sampling(system, b, x_bar, sampler=None, tol_active: float = DEFAULT_TOL_ACTIVE,
                 seed: int = 0) -> ClmSamplingResult:
    """Running max of ``d_*(0, ∂f(x))^-1`` over sampled infeasible ``x`` near ``x_bar``.

    ``system`` is a :class:`FiniteSystem` (with ``b``) or a continuous system
    (``b`` ignored, its own right-hand side is used).  ``sampler`` is an
    array of points, an iterable of points, or None for
    :func:`radial_sampler`.  Feasible samples are skipped; if none remain an
    :class:`EmptySamplerWarning` is issued and the estimate is 0.
    """
    if sampler is None:
        sampler = radial_sampler(x_bar, seed=seed)
    vals, idx = [], []
    for i, x in enumerate(sampler):
        x = np.asarray(x, dtype=float)
        f, v = _outside_value(system, b, x, tol_active)
        if f > 0:
            vals.append(v)
            idx.append(i)
    if not vals:
        warnings.warn("no sample violates the system; estimate is 0", EmptySamplerWarning,
                      stacklevel=2)
        z = np.zeros(0)
        return ClmSamplingResult(Modulus.ZERO, z, z, np.zeros(0, dtype=int))
    vals = np.array(vals)
    run = np.maximum.accumulate(vals)
    return ClmSamplingResult(Modulus(run[-1]), vals, run, np.array(idx))
