"""Semi-infinite systems indexed by intervals plus finitely many extra rows.

A :class:`ContinuousSystem` is sampled on a grid to give a
:class:`~hoffman.core.FiniteSystem`; the grid always contains both endpoints
of every interval.  Residuals and maximizing indices of the continuous
system itself are computed on a dense grid with local refinement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .core import FiniteSystem, HoffmanError, NormKind


class UnknownBuiltin(HoffmanError, KeyError):
    pass


@dataclass(frozen=True)
class Segment:
    """An index interval ``[lo, hi]`` with vectorized ``t -> a_t`` and ``t -> b_t``.

    ``coef`` maps a 1-D array of ``k`` indices to a ``(k, n)`` array and
    ``rhs`` maps it to a ``(k,)`` array.
    """

    lo: float
    hi: float
    coef: Callable[[np.ndarray], np.ndarray]
    rhs: Callable[[np.ndarray], np.ndarray]
    samples: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise ValueError(f"segment needs finite lo < hi, got [{self.lo}, {self.hi}]")

    @classmethod
    def from_samples(cls, samples) -> "Segment":
        """Piecewise-linear interpolation of rows ``[t, a_1, ..., a_n, b]``."""
        S = np.asarray(samples, dtype=float)
        if S.ndim != 2 or S.shape[0] < 2 or S.shape[1] < 3:
            raise ValueError("tabulated samples need at least two rows of [t, a..., b]")
        if not np.all(np.isfinite(S)):
            raise ValueError("tabulated samples must be finite")
        if np.any(np.diff(S[:, 0]) <= 0):
            raise ValueError("sample abscissae must be strictly increasing")
        S = S.copy()
        S.setflags(write=False)
        ts = S[:, 0]

        def coef(t):
            t = np.atleast_1d(t)
            return np.stack([np.interp(t, ts, S[:, j]) for j in range(1, S.shape[1] - 1)], axis=1)

        def rhs(t):
            return np.interp(np.atleast_1d(t), ts, S[:, -1])

        return cls(float(ts[0]), float(ts[-1]), coef, rhs, samples=S)

    def nodes(self, step: float) -> np.ndarray:
        length = self.hi - self.lo
        k = int(math.floor(length / step + 1e-9))
        t = self.lo + step * np.arange(k + 1)
        if self.hi - t[-1] > 1e-9 * max(1.0, abs(self.hi)):
            t = np.append(t, self.hi)
        else:
            t[-1] = self.hi
        return t


@dataclass(frozen=True)
class GridSpec:
    step: float
    include_endpoints: bool = True

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValueError(f"grid step must be positive, got {self.step}")
        if not self.include_endpoints:
            raise ValueError("interval endpoints are always part of the grid")


@dataclass(frozen=True, eq=False)
class ContinuousSystem:
    n: int
    segments: Tuple[Segment, ...]
    extra_rows: Tuple[Tuple[str, np.ndarray, float], ...] = ()
    norm: NormKind = NormKind.L2
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        extras = tuple((str(lab), np.asarray(a, dtype=float).reshape(self.n), float(bt))
                       for lab, a, bt in self.extra_rows)
        object.__setattr__(self, "extra_rows", extras)
        object.__setattr__(self, "norm", NormKind.parse(self.norm))
        if not self.segments and not extras:
            raise ValueError("a system needs at least one segment or extra row")

    def _seg_label(self, k: int, t: float) -> str:
        prefix = f"s{k}:" if len(self.segments) > 1 else ""
        return f"{prefix}t={t:.17g}"

    def discretize(self, grid) -> Tuple[FiniteSystem, np.ndarray]:
        """The finite subsystem on the grid nodes plus the extra rows, with its rhs."""
        g = grid if isinstance(grid, GridSpec) else GridSpec(float(grid))
        rows, rhs, labels = [], [], []
        for k, seg in enumerate(self.segments):
            if g.step > seg.hi - seg.lo + 1e-12:
                raise ValueError(f"grid step {g.step} exceeds interval length {seg.hi - seg.lo}")
            t = seg.nodes(g.step)
            rows.append(np.asarray(seg.coef(t), dtype=float).reshape(len(t), self.n))
            rhs.append(np.asarray(seg.rhs(t), dtype=float).reshape(len(t)))
            labels.extend(self._seg_label(k, ti) for ti in t)
        for lab, a, bt in self.extra_rows:
            rows.append(a[None, :])
            rhs.append(np.array([bt]))
            labels.append(lab)
        A = np.vstack(rows)
        b = np.concatenate(rhs)
        return FiniteSystem(A, tuple(labels), self.norm), b

    def _profiles(self, x, resolution):
        x = np.asarray(x, dtype=float).reshape(self.n)
        for seg in self.segments:
            k = max(2001, int(math.ceil((seg.hi - seg.lo) / resolution)) + 1)
            t = np.linspace(seg.lo, seg.hi, k)
            yield seg, t, seg.coef(t) @ x - seg.rhs(t)

    def residual(self, x, resolution: float = 1e-4) -> float:
        """``sup_t (a_t'x - b_t)`` over the dense grid, refined around local maxima."""
        return max(v for _, v, _ in self._candidates(x, resolution))

    def _candidates(self, x, resolution, keep: int = 16):
        """(label, value, a_t) at refined local maxima of each segment, plus extra rows."""
        x = np.asarray(x, dtype=float).reshape(self.n)
        out = []
        for k, (seg, t, g) in enumerate(self._profiles(x, resolution)):
            pad = np.concatenate([[-np.inf], g, [-np.inf]])
            peaks = np.flatnonzero((pad[1:-1] >= pad[:-2]) & (pad[1:-1] >= pad[2:]))
            peaks = peaks[np.argsort(-g[peaks], kind="stable")[:keep]]
            for i in peaks:
                a, c = t[max(i - 1, 0)], t[min(i + 1, len(t) - 1)]
                best_t, best_v = t[i], g[i]
                if c > a:
                    res = minimize_scalar(
                        lambda s: -(seg.coef(np.array([s]))[0] @ x - seg.rhs(np.array([s]))[0]),
                        bounds=(a, c), method="bounded", options={"xatol": 1e-13})
                    if -res.fun > best_v:
                        best_t, best_v = float(res.x), float(-res.fun)
                out.append((self._seg_label(k, best_t), float(best_v),
                            np.asarray(seg.coef(np.array([best_t]))[0], dtype=float)))
        for lab, a, bt in self.extra_rows:
            out.append((lab, float(a @ x - bt), a))
        return out

    def argmax_set(self, x, tol_active: float = 1e-9,
                   resolution: float = 1e-4) -> List[Tuple[str, np.ndarray]]:
        """Indices (label, a_t) attaining the residual up to a relative tolerance."""
        cands = self._candidates(x, resolution)
        fmax = max(v for _, v, _ in cands)
        scale = max(1.0, float(np.linalg.norm(np.asarray(x, dtype=float))))
        return [(lab, a) for lab, v, a in cands if v >= fmax - tol_active * scale]


def _exa43_coef(t):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return np.stack([t * np.cos(t), t * np.sin(t)], axis=1)


def _exa49_coef(t):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return np.stack([1.0 + t * np.cos(t), t * np.sin(t)], axis=1)


def builtin(name: str, norm="l2") -> ContinuousSystem:
    """Closed-form systems ``"example-4-3"`` and ``"example-4-9"``.

    ``example-4-3``: ``t cos t x1 + t sin t x2 <= t`` on ``[0, pi]`` with
    extra rows ``x1 <= 1`` (label ``t=4``) and ``-x1 - x2 <= 1`` (``t=5``).

    ``example-4-9``: ``(1 + t cos t) x1 + (t sin t) x2 <= 0`` on ``[0, pi/2]``.
    """
    if name == "example-4-3":
        seg = Segment(0.0, math.pi, _exa43_coef, lambda t: np.atleast_1d(np.asarray(t, dtype=float)))
        extras = (("t=4", np.array([1.0, 0.0]), 1.0), ("t=5", np.array([-1.0, -1.0]), 1.0))
        return ContinuousSystem(2, (seg,), extras, NormKind.parse(norm), name)
    if name == "example-4-9":
        seg = Segment(0.0, math.pi / 2, _exa49_coef,
                      lambda t: np.zeros(np.atleast_1d(t).shape))
        return ContinuousSystem(2, (seg,), (), NormKind.parse(norm), name)
    raise UnknownBuiltin(f"unknown builtin system {name!r}; expected example-4-3 or example-4-9")


BUILTINS = ("example-4-3", "example-4-9")
