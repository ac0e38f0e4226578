"""Domain types and residual machinery for systems ``a_t'x <= b_t``.

A :class:`FiniteSystem` holds the left-hand side only; right-hand sides are
plain vectors passed alongside it, since every modulus in this package is
taken with respect to perturbations of ``b``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

DEFAULT_TOL_ACTIVE = 1e-9


class HoffmanError(Exception):
    """Base class for errors raised by this package."""


class DimensionMismatch(HoffmanError, ValueError):
    pass


class InfeasiblePoint(HoffmanError, ValueError):
    """A point that was required to be feasible violates the system."""


class InfeasibleSystem(HoffmanError):
    """The feasible set F(b) is empty."""


class SizeLimit(HoffmanError):
    """A combinatorial enumeration would exceed its configured cap."""


class NumericalFailure(HoffmanError, ArithmeticError):
    pass


class NormKind(enum.Enum):
    L1 = "l1"
    L2 = "l2"
    LINF = "linf"

    @property
    def dual(self) -> "NormKind":
        return _DUALS[self]

    @property
    def ord(self) -> float:
        return {NormKind.L1: 1, NormKind.L2: 2, NormKind.LINF: np.inf}[self]

    def __call__(self, v) -> float:
        return float(np.linalg.norm(np.asarray(v, dtype=float), self.ord))

    @classmethod
    def parse(cls, value) -> "NormKind":
        if isinstance(value, NormKind):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown norm {value!r}; expected l1, l2 or linf") from None


_DUALS = {NormKind.L1: NormKind.LINF, NormKind.L2: NormKind.L2, NormKind.LINF: NormKind.L1}


class Modulus(float):
    """A nonnegative extended real; ``Modulus.INF`` is the value +inf.

    Behaves as a float everywhere (``max``, comparisons, arithmetic), but
    refuses negative and NaN values at construction.
    """

    INF: "Modulus"
    ZERO: "Modulus"

    def __new__(cls, value=0.0):
        v = float(value)
        if math.isnan(v) or v < 0:
            raise ValueError(f"a modulus must be nonnegative, got {value!r}")
        return super().__new__(cls, v)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self)

    def inverse(self) -> "Modulus":
        """``1/d`` with ``1/0 = +inf`` and ``1/inf = 0``."""
        if self == 0:
            return Modulus.INF
        return Modulus(1.0 / self)

    def to_json(self):
        return "inf" if self.is_infinite else float(self)

    def __repr__(self):
        return "Modulus(inf)" if self.is_infinite else f"Modulus({float(self)!r})"


Modulus.INF = Modulus(math.inf)
Modulus.ZERO = Modulus(0.0)


def sup(values: Iterable[float]) -> Modulus:
    """Supremum with the convention ``sup(empty) = 0``."""
    best = Modulus.ZERO
    for v in values:
        if v > best:
            best = Modulus(v)
    return best


@dataclass(frozen=True)
class IndexSubset:
    """Sorted row indices, optionally carrying a witness vector.

    The certificate is whatever proves membership: a direction ``d`` for a
    D-family member, or simplex weights for a hull distance.
    """

    indices: tuple
    certificate: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(j <= i for i, j in zip(idx, idx[1:])):
            raise ValueError(f"indices must be strictly increasing: {idx}")
        if idx and idx[0] < 0:
            raise ValueError("negative row index")
        object.__setattr__(self, "indices", idx)

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)

    def __contains__(self, i):
        return i in self.indices

    def issubset(self, other: "IndexSubset") -> bool:
        return set(self.indices) <= set(other.indices)


@dataclass(frozen=True, eq=False)
class FiniteSystem:
    """Coefficient rows ``a_t`` of ``{a_t'x <= b_t, t in T}`` with a norm on R^n.

    Zero rows are allowed and kept.  Instances compare and hash by identity,
    which lets them key caches.
    """

    A: np.ndarray
    labels: tuple = ()
    norm: NormKind = NormKind.L2

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim == 1:
            A = A[:, None]
        if A.ndim != 2 or A.shape[0] == 0 or A.shape[1] == 0:
            raise ValueError("a system needs at least one row and a positive dimension")
        if not np.all(np.isfinite(A)):
            raise ValueError("coefficients must be finite")
        A.setflags(write=False)
        labels = tuple(str(s) for s in self.labels) or tuple(f"r{i}" for i in range(A.shape[0]))
        if len(labels) != A.shape[0]:
            raise ValueError("one label per row is required")
        if len(set(labels)) != len(labels):
            raise ValueError("row labels must be unique")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "norm", NormKind.parse(self.norm))

    @classmethod
    def from_rows(cls, rows: Sequence, norm="l2", labels: Sequence[str] = ()) -> "FiniteSystem":
        return cls(np.atleast_2d(np.asarray(rows, dtype=float)), tuple(labels), NormKind.parse(norm))

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def rows(self, idx: Iterable[int]) -> np.ndarray:
        return self.A[list(idx)]

    def with_norm(self, norm) -> "FiniteSystem":
        return FiniteSystem(self.A, self.labels, NormKind.parse(norm))

    def check_rhs(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=float).reshape(-1)
        if b.shape != (self.m,):
            raise DimensionMismatch(f"rhs has length {b.size}, system has {self.m} rows")
        if not np.all(np.isfinite(b)):
            raise ValueError("rhs entries must be finite")
        return b

    def check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape != (self.n,):
            raise DimensionMismatch(f"point has dimension {x.size}, system has n={self.n}")
        return x


def box_system(norm="l2") -> FiniteSystem:
    """``{x1 <= 1, -x1 <= 1, x2 <= 1, -x2 <= 1}`` (use ``b = ones(4)``)."""
    return FiniteSystem.from_rows([[1, 0], [-1, 0], [0, 1], [0, -1]], norm,
                                  labels=["x1<=1", "-x1<=1", "x2<=1", "-x2<=1"])


def slacks(sys: FiniteSystem, b, x) -> np.ndarray:
    """``a_t'x - b_t`` for every row."""
    return sys.A @ sys.check_point(x) - sys.check_rhs(b)


def residual(sys: FiniteSystem, b, x) -> float:
    """``f_b(x) = max_t (a_t'x - b_t)``; negative at Slater points."""
    return float(np.max(slacks(sys, b, x)))


def rhs_distance(sys: FiniteSystem, b, x) -> Modulus:
    """Sup-norm distance from ``b`` to ``F^{-1}(x)``, i.e. ``[f_b(x)]_+``."""
    return Modulus(max(residual(sys, b, x), 0.0))


def _scale(sys: FiniteSystem, b: np.ndarray, x: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(b))), sys.norm(x))


def active_set(sys: FiniteSystem, b, x, tol_active: float = DEFAULT_TOL_ACTIVE) -> IndexSubset:
    """Rows with ``|a_t'x - b_t| <= tol_active * max(1, |b|_inf, |x|)``.

    Raises :class:`InfeasiblePoint` if ``x`` violates the system beyond the
    same tolerance.
    """
    b = sys.check_rhs(b)
    x = sys.check_point(x)
    s = sys.A @ x - b
    tol = tol_active * _scale(sys, b, x)
    if s.max() > tol:
        raise InfeasiblePoint(f"residual {s.max():.3e} exceeds tolerance {tol:.3e}")
    return IndexSubset(tuple(np.flatnonzero(np.abs(s) <= tol)))


def argmax_set(sys: FiniteSystem, b, x, tol_active: float = DEFAULT_TOL_ACTIVE) -> IndexSubset:
    """Indices attaining ``f_b(x)`` up to the relative tolerance; never empty."""
    b = sys.check_rhs(b)
    x = sys.check_point(x)
    s = sys.A @ x - b
    tol = tol_active * _scale(sys, b, x)
    return IndexSubset(tuple(np.flatnonzero(s >= s.max() - tol)))
