"""Sampling estimators for calmness-type moduli of a multifunction ``M: R ⇉ R^n``.

The four quantities, for a nominal parameter ``y0``:

* ``clm(y0, x0)``: ratio ``d(x, M(y0)) / |y - y0|`` over graph points near ``(y0, x0)``;
* ``uclm(y0)``: the same ratio over graph points with ``y`` near ``y0`` and
  ``x`` within ``eps`` of ``M(y0)``;
* ``lipusc(y0)``: over every ``x in M(y)`` with ``y`` near ``y0``;
* ``hof(y0)``: over the whole graph.

Every estimate is a maximum over samples, hence a lower bound.  Samples are
organized in levels of shrinking radius; the sample set of a level contains
all finer levels, and level ``k`` uses ``eps_k >= rho_k``, so the ordering
``sup clm <= uclm <= lipusc <= hof`` holds level by level.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .core import HoffmanError, Modulus

DEFAULT_CAP = 1e6


class UnknownFixture(HoffmanError, KeyError):
    pass


@dataclass(frozen=True)
class SampledMultifunction:
    """A multifunction from the real line into ``R^n``, known through samples.

    ``evaluator(y)`` returns a finite sample of ``M(y)`` as a ``(k, n)`` or
    ``(k,)`` array (empty outside the domain).  ``distance_to_nominal``
    maps a ``(k, n)`` array to distances from ``M(y_bar)``; without it the
    distance to the sample ``evaluator(y_bar)`` is used.  The optional
    ``inverse_distance(x)`` is ``d(y_bar, M^{-1}(x))`` and enables the
    second uniform-calmness route.
    """

    evaluator: Callable[[float], np.ndarray]
    y_bar: float
    distance_to_nominal: Optional[Callable[[np.ndarray], np.ndarray]] = None
    inverse_distance: Optional[Callable[[np.ndarray], np.ndarray]] = None
    domain: Tuple[float, float] = (-math.inf, math.inf)
    name: str = ""

    def sample(self, y: float) -> np.ndarray:
        X = np.asarray(self.evaluator(float(y)), dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        return X

    def nominal_distance(self, X: np.ndarray) -> np.ndarray:
        if self.distance_to_nominal is not None:
            return np.asarray(self.distance_to_nominal(X), dtype=float).reshape(len(X))
        base = self.sample(self.y_bar)
        return np.min(np.linalg.norm(X[:, None, :] - base[None, :, :], axis=2), axis=1)


@dataclass(frozen=True)
class Schedule:
    """Shrinking neighborhoods and sample budgets.

    ``radii`` bound ``|y - y_bar|`` (and ``|x - x_bar|`` for calmness),
    ``eps`` bound ``d(x, M(y_bar))`` for uniform calmness (defaults to
    ``radii``; each must be at least its radius).  Within a level, offsets
    ``|y - y_bar|`` are log-uniform over ``decades`` decades below the radius,
    but never below ``min_offset``: much smaller offsets drown the distance
    ``d(x, M(y_bar))`` in the rounding error of ``x``.
    """

    radii: Tuple[float, ...] = (1e-1, 1e-2, 1e-3, 1e-4)
    eps: Optional[Tuple[float, ...]] = None
    per_level: int = 400
    decades: float = 12.0
    min_offset: float = 1e-12
    global_samples: int = 2000
    global_radius: float = 10.0
    seed: int = 0
    cap: float = DEFAULT_CAP

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        if not radii or any(r <= 0 for r in radii) or any(b > a for a, b in zip(radii, radii[1:])):
            raise ValueError("radii must be positive and nonincreasing")
        eps = radii if self.eps is None else tuple(float(e) for e in self.eps)
        if len(eps) != len(radii) or any(e < r for e, r in zip(eps, radii)):
            raise ValueError("need one eps per radius, each at least the radius")
        if any(b > a for a, b in zip(eps, eps[1:])):
            raise ValueError("eps must be nonincreasing")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "eps", eps)

    def refined(self, factor: float = 10.0) -> "Schedule":
        """The schedule with one extra, finer level."""
        return Schedule(self.radii + (self.radii[-1] / factor,), self.eps + (self.eps[-1] / factor,),
                        self.per_level, self.decades, self.min_offset, self.global_samples,
                        self.global_radius, self.seed, self.cap)


@dataclass(frozen=True)
class ModuliEstimates:
    """Finest-level estimates, per-level values and divergence flags.

    ``levels[name][k]`` is the estimate using neighborhoods of level ``k``;
    ``diverged[name]`` is set when the last two levels both exceed the cap.
    """

    clm_per_point: Tuple[Tuple[np.ndarray, Modulus], ...]
    sup_clm: Modulus
    uclm: Modulus
    lipusc: Modulus
    hof: Modulus
    levels: Dict[str, Tuple[float, ...]]
    diverged: Dict[str, bool]
    counts: Tuple[int, ...]
    schedule: Schedule
    uclm_inverse: Optional[Modulus] = None

    def chain_holds(self, tol: float = 1e-6) -> bool:
        seq = [self.sup_clm, self.uclm, self.lipusc, self.hof]
        return all(a <= b + tol for a, b in zip(seq, seq[1:]))


def _ratio_max(num, den, mask):
    ok = mask & (den > 0)
    if not ok.any():
        return 0.0
    return float(np.max(num[ok] / den[ok]))


def estimate_moduli(m: SampledMultifunction, schedule: Optional[Schedule] = None) -> ModuliEstimates:
    """Estimate ``sup clm``, ``uclm``, ``lipusc`` and ``hof`` at ``m.y_bar``."""
    sc = schedule or Schedule()
    rng = np.random.default_rng(sc.seed)
    y0 = float(m.y_bar)
    lo, hi = m.domain
    K = len(sc.radii)

    ys, lev = [], []
    for k, rho in enumerate(sc.radii):
        span = min(sc.decades, max(math.log10(rho / sc.min_offset), 0.0))
        off = rho * 10.0 ** (-span * rng.random(sc.per_level))
        sgn = np.where(rng.random(sc.per_level) < 0.5, -1.0, 1.0)
        yk = np.concatenate([y0 + sgn * off, [y0 - rho, y0 + rho]])
        ys.append(yk)
        lev.append(np.full(yk.size, k))
    G = sc.global_radius
    yg = np.concatenate([y0 + G * (2 * rng.random(sc.global_samples) - 1),
                         y0 + np.where(rng.random(sc.global_samples) < 0.5, -1, 1)
                         * G * 10.0 ** (-min(sc.decades, math.log10(G / sc.min_offset))
                                         * rng.random(sc.global_samples))])
    ys.append(yg)
    lev.append(np.full(yg.size, -1))
    ys = np.concatenate(ys)
    lev = np.concatenate(lev)
    keep = (ys >= lo) & (ys <= hi)
    ys, lev = ys[keep], lev[keep]

    # one record per graph point
    Ys, Ls, Xs = [], [], []
    for y, l in zip(ys, lev):
        X = m.sample(y)
        if X.size == 0:
            continue
        Xs.append(X)
        Ys.append(np.full(len(X), y))
        Ls.append(np.full(len(X), l))
    Y = np.concatenate(Ys)
    L = np.concatenate(Ls)
    X = np.vstack(Xs)
    dy = np.abs(Y - y0)
    dx = m.nominal_distance(X)

    base = m.sample(y0)
    # level k sees its own samples and every finer level's
    in_level = [(L >= k) for k in range(K)]
    clm_lv = np.zeros((K, len(base)))
    uclm_lv, lip_lv = np.zeros(K), np.zeros(K)
    counts = []
    for k in range(K):
        rho, eps = sc.radii[k], sc.eps[k]
        near_y = in_level[k] & (dy <= rho)
        counts.append(int(near_y.sum()))
        lip_lv[k] = _ratio_max(dx, dy, near_y)
        uclm_lv[k] = _ratio_max(dx, dy, near_y & (dx <= eps))
        for j, xb in enumerate(base):
            near_x = np.linalg.norm(X - xb, axis=1) <= rho
            clm_lv[k, j] = _ratio_max(dx, dy, near_y & near_x)
    hof = max(_ratio_max(dx, dy, np.ones(len(dy), dtype=bool)), float(lip_lv[0]))
    sup_lv = clm_lv.max(axis=1) if len(base) else np.zeros(K)

    uclm_inv = None
    if m.inverse_distance is not None:
        inv = np.asarray(m.inverse_distance(X), dtype=float).reshape(len(X))
        uclm_inv = Modulus(_ratio_max(dx, inv, np.isfinite(inv) & (dx <= sc.eps[-1])))

    levels = {"sup_clm": tuple(map(float, sup_lv)), "uclm": tuple(map(float, uclm_lv)),
              "lipusc": tuple(map(float, lip_lv)), "hof": (float(hof),) * K}
    tail = slice(max(K - 2, 0), K)
    diverged = {name: bool(np.all(np.asarray(v)[tail] > sc.cap)) for name, v in levels.items()}
    per_point = tuple((xb.copy(), Modulus(v)) for xb, v in zip(base, clm_lv[-1]))
    return ModuliEstimates(per_point, Modulus(sup_lv[-1]), Modulus(uclm_lv[-1]),
                           Modulus(lip_lv[-1]), Modulus(hof), levels, diverged,
                           tuple(counts), sc, uclm_inv)


# ---------------------------------------------------------------- fixtures

def _staircase(R: float, y_bar: float, small: int = 20):
    R = float(R)
    offsets = np.concatenate([[0.0], np.geomspace(1e-9, 1.0, 80)])

    def branches(y):
        rs = set(range(1, int(min(small, R)) + 1))
        if y > 0:
            c = 1.0 / y
            cand = np.ceil(c * (1.0 + offsets))
            rs.update(float(r) for r in cand if 1 <= r <= R)
            if c >= R:
                rs.add(R)
        return np.array(sorted(rs), dtype=float)

    def h(r, y):
        # r + y below the kink at 1/r, slope r above it
        return np.where(y <= 1.0 / r, r + y, r + (1.0 / r + r * y - 1.0))

    def evaluator(y):
        r = branches(y)
        return h(r, y)

    def dist(X):
        x = X[:, 0]
        nearest = np.clip(np.round(x), 1.0, R)
        return np.abs(x - nearest)

    if y_bar != 0:
        dist = None
    return SampledMultifunction(evaluator, y_bar, dist, name="staircase")


def _step(y_bar: float):
    def evaluator(y):
        return np.array([0.0 if y <= 0 else 1.0])

    v = 0.0 if y_bar <= 0 else 1.0
    return SampledMultifunction(evaluator, y_bar, lambda X: np.abs(X[:, 0] - v), name="step")


def _interval_dist(x, a, b):
    return np.maximum(np.maximum(a - x, x - b), 0.0)


def _interval(y_bar: float):
    unit = np.linspace(0.0, 1.0, 11)
    tall = np.concatenate([unit, np.geomspace(1.0, 1e12, 25)])

    def evaluator(y):
        return unit if y < 0 else tall

    top = 1.0 if y_bar < 0 else math.inf
    return SampledMultifunction(evaluator, y_bar, lambda X: _interval_dist(X[:, 0], 0.0, top),
                                name="interval")


def _truncated_halfline(y_bar: float):
    depth = np.concatenate([[0.0], np.geomspace(1e-6, 1e6, 40)])

    def evaluator(y):
        return min(y, 0.0) - depth

    top = min(y_bar, 0.0)
    return SampledMultifunction(evaluator, y_bar, lambda X: np.maximum(X[:, 0] - top, 0.0),
                                name="truncated-halfline")


_DEFAULT_Y = {"staircase": 0.0, "step": 0.0, "interval": -1.0, "truncated-halfline": -0.5}
FIXTURES = tuple(_DEFAULT_Y)


def fixture(name: str, y_bar: Optional[float] = None, R: float = 1e3) -> SampledMultifunction:
    """The four one-dimensional examples.

    * ``staircase``: ``M(y) = {h_r(y) : r = 1..R}`` with ``h_r(y) = r + y``
      for ``y <= 1/r`` and slope ``r`` beyond; truncating at ``R`` caps the
      uniform-calmness estimate near ``eps * R``, so divergence only shows
      for large ``R``.  Only the branches that matter near ``y`` are sampled.
    * ``step``: ``M(y) = {0}`` for ``y <= 0`` and ``{1}`` otherwise.
    * ``interval``: ``[0, 1]`` for ``y < 0`` and ``[0, inf)`` otherwise.
    * ``truncated-halfline``: ``(-inf, min(y, 0)]``.
    """
    if name not in _DEFAULT_Y:
        raise UnknownFixture(f"unknown fixture {name!r}; expected one of {', '.join(FIXTURES)}")
    y = _DEFAULT_Y[name] if y_bar is None else float(y_bar)
    if name == "staircase":
        return _staircase(R, y)
    if name == "step":
        return _step(y)
    if name == "interval":
        return _interval(y)
    return _truncated_halfline(y)


def polygon_fixture(seed: int = 0, n_points: int = 12, samples_per_slice: int = 9) -> SampledMultifunction:
    """``M(y) = {x : (y, x) in P}`` for a random convex polygon ``P``.

    The graph is convex and the images closed, so all four moduli coincide.
    ``y_bar`` is drawn from the middle of the projection of ``P``.
    """
    from scipy.spatial import ConvexHull

    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1, 1, size=(n_points, 2)) * np.array([1.0, rng.uniform(0.3, 3.0)])
    hull = ConvexHull(pts)
    eq = hull.equations  # a_y y + a_x x + c <= 0
    ay, ax, c = eq[:, 0], eq[:, 1], eq[:, 2]
    V = pts[hull.vertices]
    ylo, yhi = float(V[:, 0].min()), float(V[:, 0].max())
    up, dn = ax > 1e-12, ax < -1e-12

    def slice_(y):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        b = (-c[None, :] - ay[None, :] * y[:, None])
        hi_ = np.min(np.where(up, b / np.where(up, ax, 1.0), np.inf), axis=1)
        lo_ = np.max(np.where(dn, b / np.where(dn, ax, 1.0), -np.inf), axis=1)
        return lo_, hi_

    def evaluator(y):
        if not ylo <= y <= yhi:
            return np.zeros(0)
        a, b = slice_(y)
        a, b = float(a[0]), float(b[0])
        if a > b:
            a = b = 0.5 * (a + b)
        return np.linspace(a, b, samples_per_slice)

    y_bar = float(ylo + (yhi - ylo) * rng.uniform(0.3, 0.7))
    a0, b0 = (float(v[0]) for v in slice_(y_bar))

    def inverse(X):
        # slice of the graph at height x, as an interval of y
        x = X[:, 0]
        xs = V[:, 1]
        out = np.full(len(x), np.inf)
        order = np.r_[np.arange(len(V)), 0]
        for i, xv in enumerate(x):
            ys = []
            for j in range(len(V)):
                p, q = V[order[j]], V[order[j + 1]]
                if (p[1] - xv) * (q[1] - xv) <= 0 and p[1] != q[1]:
                    s = (xv - p[1]) / (q[1] - p[1])
                    ys.append(p[0] + s * (q[0] - p[0]))
                elif p[1] == xv:
                    ys.append(p[0])
            if ys and xs.min() <= xv <= xs.max():
                out[i] = float(_interval_dist(np.array([y_bar]), min(ys), max(ys))[0])
        return out

    return SampledMultifunction(evaluator, y_bar, lambda X: _interval_dist(X[:, 0], a0, b0),
                                inverse, domain=(ylo, yhi), name=f"polygon-{seed}")


def max_shift_kappa(eps: float, samples: int = 10_000) -> float:
    """Smallest ``kappa`` with ``d(x, M(0)) <= kappa d(0, M^{-1}(x))`` on ``|x| < eps``
    for ``M(y) = max(0, y - 1)``, by sampling; tends to ``eps / (1 + eps)``.

    A neighborhood of 0 makes the same map calm with constant 0, so the
    two formulations of uniform calmness genuinely differ when the constant is 0.
    """
    x = np.linspace(-eps, eps, samples + 2)[1:-1]
    d_nom = np.abs(x)  # M(0) = {0}
    with np.errstate(divide="ignore", invalid="ignore"):
        # M^{-1}(x) = {1 + x} for x > 0, (-inf, 1] for x = 0, empty for x < 0
        d_inv = np.where(x > 0, 1.0 + x, np.where(x == 0, 0.0, np.inf))
        r = np.where(d_nom > 0, d_nom / d_inv, 0.0)
    return float(r.max())
