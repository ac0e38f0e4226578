"""Global Hoffman constant ``Hof F`` of a finite system, by three routes.

* independent subsets:  max over J with rank A_J = rank A, rows independent,
  of ``d_*(0, conv{a_t, t in J})^-1`` (the default);
* exhaustive:  the same max over *every* J whose hull misses the origin;
* dual certificate:  a ``y >= 0`` with independent support, ``|A'y|_* = 1``
  and ``|y|_1 = Hof F``, built from the minimizing simplex weights.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .core import FiniteSystem, IndexSubset, Modulus, SizeLimit
from .geometry import dual_distance_to_hull, independent_subset_array, segment_dual_distances
from .geometry.polyhedra import SUBSET_CAP, TOL_RANK

# hulls closer to the origin than this (relative to their largest point) contain it
HULL_ZERO_TOL = 1e-10
EXHAUSTIVE_MAX_ROWS = 24


@dataclass(frozen=True)
class GlobalHoffmanReport:
    value: Modulus
    subset: IndexSubset
    certificate: np.ndarray
    routes: Dict[str, Modulus] = field(default_factory=dict)
    grid_step: Optional[float] = None


def _inverse_distance(dist: float, pts: np.ndarray, dual) -> float:
    scale = max(float(np.linalg.norm(pts, ord=dual.ord, axis=1).max()), np.finfo(float).tiny)
    if dist <= HULL_ZERO_TOL * scale:
        return 0.0
    return 1.0 / dist


def _subset_inverse_distances(sys: FiniteSystem, combos: np.ndarray) -> np.ndarray:
    dual = sys.norm.dual
    r = combos.shape[1]
    if r == 1:
        d = np.linalg.norm(sys.A[combos[:, 0]], ord=dual.ord, axis=1)
    elif r == 2:
        d = np.empty(len(combos))
        step = 500_000
        for s in range(0, len(combos), step):
            c = combos[s:s + step]
            d[s:s + step] = segment_dual_distances(sys.A[c[:, 0]], sys.A[c[:, 1]], sys.norm)
    else:
        d = np.array([float(dual_distance_to_hull(sys.A[c], sys.norm).distance) for c in combos])
    pts_scale = np.linalg.norm(sys.A, ord=dual.ord, axis=1)[combos].max(axis=1)
    inv = np.zeros(len(combos))
    ok = d > HULL_ZERO_TOL * np.maximum(pts_scale, np.finfo(float).tiny)
    inv[ok] = 1.0 / d[ok]
    return inv


def hof_global(sys: FiniteSystem, exhaustive: bool = False, tol_rank: float = TOL_RANK,
               cap: int = SUBSET_CAP) -> GlobalHoffmanReport:
    """``Hof F`` from the independent-subset formula, with its dual certificate.

    With ``exhaustive=True`` the all-subsets value is computed as well and
    stored under ``routes['exhaustive']``.
    """
    combos = independent_subset_array(sys, tol_rank, cap)
    y = np.zeros(sys.m)
    if combos.size == 0:
        value, subset = Modulus.ZERO, IndexSubset(())
    else:
        inv = _subset_inverse_distances(sys, combos)
        k = int(np.argmax(inv))  # first maximum = lexicographically smallest subset
        J = tuple(int(i) for i in combos[k])
        if inv[k] == 0:
            value, subset = Modulus.ZERO, IndexSubset(())
        else:
            res = dual_distance_to_hull(sys.A[list(J)], sys.norm)
            value = res.distance.inverse()
            y[list(J)] = res.weights / float(res.distance)
            subset = IndexSubset(J, certificate=res.weights)
    routes = {"independent": value}
    if exhaustive:
        routes["exhaustive"] = hof_global_exhaustive(sys)
    return GlobalHoffmanReport(value, subset, y, routes)


def hof_global_exhaustive(sys: FiniteSystem, max_rows: int = EXHAUSTIVE_MAX_ROWS) -> Modulus:
    """Max of ``d_*(0, conv{a_t, t in J})^-1`` over all ``J`` whose hull misses 0.

    Exponential in the row count; ``J = ∅`` contributes 0.
    """
    if sys.m > max_rows:
        raise SizeLimit(f"exhaustive route limited to {max_rows} rows, system has {sys.m}")
    dual = sys.norm.dual
    best = 0.0
    for size in range(1, sys.m + 1):
        for J in itertools.combinations(range(sys.m), size):
            pts = sys.A[list(J)]
            d = float(dual_distance_to_hull(pts, sys.norm).distance)
            best = max(best, _inverse_distance(d, pts, dual))
    return Modulus(best)


def hof_global_grid(csys, grid_step: float, tol_rank: float = TOL_RANK,
                    cap: int = SUBSET_CAP) -> GlobalHoffmanReport:
    """``hof_global`` of the system sampled on a grid; a lower estimate of the continuous ``Hof F``."""
    fsys, _ = csys.discretize(grid_step)
    rep = hof_global(fsys, tol_rank=tol_rank, cap=cap)
    return GlobalHoffmanReport(rep.value, rep.subset, rep.certificate, rep.routes, grid_step=grid_step)
