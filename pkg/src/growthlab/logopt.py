"""Normalized returns and the finite-support log-optimal portfolio solver.

The solver maximizes sum_j w_j log<b, atom_j> over the open simplex via a
damped multiplicative fixed-point iteration whose fixed point is exactly
the Kuhn-Tucker point; the KT residual vector doubles as the optimality
certificate.  All expectations here are exact finite sums over atoms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _fast
from .errors import (
    DimensionMismatch,
    EmptyDistribution,
    NonPositiveInput,
)
from .market import AssetReturns, MarketPath

EPS_INTERIOR = 1e-9
KT_TOL = 1e-8
OBJECTIVE_TOL = 1e-10
SOLVER_MAX_ITER = 10**5
SUM_TOL = 1e-12


def _as_positive_matrix(atoms, *, name: str) -> np.ndarray:
    arr = np.asarray(atoms, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be a (K, m) matrix")
    if arr.size == 0:
        raise EmptyDistribution(f"{name} has no atoms")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise NonPositiveInput(f"{name} must be strictly positive and finite")
    return np.ascontiguousarray(arr)


@dataclass(frozen=True, eq=False)
class Portfolio:
    """A strictly positive point on the m-simplex (no shorting, no leverage)."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=np.float64).reshape(-1))
        if w.size < 2:
            raise DimensionMismatch("portfolios need at least two assets")
        # machine-level slack: renormalizing a clamped vector may shave ~1e-16
        if np.any(w < EPS_INTERIOR * (1.0 - 1e-6)) or not np.all(np.isfinite(w)):
            raise NonPositiveInput(
                f"portfolio weights must all be >= {EPS_INTERIOR:g}"
            )
        if abs(w.sum() - 1.0) > SUM_TOL:
            raise DimensionMismatch(f"portfolio weights sum to {w.sum()!r}, not 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def m(self) -> int:
        return self.weights.size


def uniform_portfolio(m: int) -> Portfolio:
    return Portfolio(np.full(m, 1.0 / m))


def clamp_to_simplex(weights, eps: float = EPS_INTERIOR) -> np.ndarray:
    """Clamp to the eps-interior of the simplex and renormalize."""
    w = np.maximum(np.asarray(weights, dtype=np.float64).reshape(-1), eps)
    return w / w.sum()


@dataclass(frozen=True, eq=False)
class NormalizedReturns:
    """Returns scaled by the equal-weight portfolio's return; mean is 1."""

    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64).reshape(-1))
        m = v.size
        if m < 2:
            raise DimensionMismatch("normalized returns need m >= 2 entries")
        if np.any(v <= 0.0) or not np.all(np.isfinite(v)):
            raise NonPositiveInput("normalized returns must be strictly positive")
        if abs(v.mean() - 1.0) > SUM_TOL:
            raise DimensionMismatch("normalized returns must average to exactly 1")
        if np.any(v > m * (1.0 + SUM_TOL)):
            raise DimensionMismatch("normalized returns are bounded by m")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def m(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class EmpiricalDistribution:
    """Finite weighted support over (raw or normalized) return vectors."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        arr = _as_positive_matrix(self.atoms, name="distribution atoms")
        w = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if w.size != arr.shape[0]:
            raise DimensionMismatch(
                f"{arr.shape[0]} atoms but {w.size} weights"
            )
        if np.any(w < 0.0) or not np.all(np.isfinite(w)):
            raise NonPositiveInput("weights must be non-negative and finite")
        if abs(w.sum() - 1.0) > SUM_TOL:
            raise DimensionMismatch(f"weights sum to {w.sum()!r}, not 1")
        arr.setflags(write=False)
        w = np.ascontiguousarray(w)
        w.setflags(write=False)
        object.__setattr__(self, "atoms", arr)
        object.__setattr__(self, "weights", w)

    @property
    def m(self) -> int:
        return self.atoms.shape[1]

    @property
    def n_atoms(self) -> int:
        return self.atoms.shape[0]

    @classmethod
    def uniform(cls, atoms) -> "EmpiricalDistribution":
        arr = _as_positive_matrix(atoms, name="distribution atoms")
        n = arr.shape[0]
        return cls(arr, np.full(n, 1.0 / n))


def _portfolio_vector(b) -> np.ndarray:
    if isinstance(b, Portfolio):
        return b.weights
    return Portfolio(b).weights


# ---------------------------------------------------------------------------
# operations


def normalize(x) -> NormalizedReturns:
    """u(x) = x / <b_hat, x>: scale-invariant, entries in (0, m], mean 1."""
    if isinstance(x, AssetReturns):
        v = x.values
    else:
        v = np.asarray(x, dtype=np.float64).reshape(-1)
    if v.size < 2:
        raise DimensionMismatch("returns need m >= 2 entries")
    if np.any(v <= 0.0) or not np.all(np.isfinite(v)):
        raise NonPositiveInput("gross returns must be strictly positive and finite")
    return NormalizedReturns(v / v.mean())


def normalize_vector(v: np.ndarray) -> np.ndarray:
    """Raw-array normalization for hot loops (no validation, no wrapper)."""
    return v / v.mean()


def expected_log_return(b, dist: EmpiricalDistribution) -> float:
    """Exact finite sum sum_j w_j log<b, atom_j>."""
    w = _portfolio_vector(b)
    if w.size != dist.m:
        raise DimensionMismatch(f"portfolio has m={w.size}, distribution m={dist.m}")
    return float(dist.weights @ np.log(dist.atoms @ w))


def kt_residuals(b, dist: EmpiricalDistribution) -> np.ndarray:
    """Component i: sum_j w_j atom_{j,i} / <b, atom_j>.

    At a log-optimal portfolio every component is <= 1 (+tol), with equality
    on assets holding interior weight.
    """
    w = _portfolio_vector(b)
    if w.size != dist.m:
        raise DimensionMismatch(f"portfolio has m={w.size}, distribution m={dist.m}")
    s = dist.atoms @ w
    return (dist.weights / s) @ dist.atoms


def solve_log_optimal(
    dist: EmpiricalDistribution,
    *,
    start=None,
    tol: float = KT_TOL,
    max_iter: int = SOLVER_MAX_ITER,
) -> Portfolio:
    """Log-optimal portfolio for a finite distribution, KT-certified.

    Deterministic: fixed initialization at the uniform portfolio (unless a
    warm start is given) and a deterministic iteration order; ties among
    non-unique maximizers are broken by the initialization.
    """
    if not isinstance(dist, EmpiricalDistribution):
        raise EmptyDistribution("solve_log_optimal needs an EmpiricalDistribution")
    m = dist.m
    if start is None:
        b0 = np.full(m, 1.0 / m)
    else:
        b0 = clamp_to_simplex(_portfolio_vector(start))
    # half the objective budget on each side keeps any two certified
    # solutions of the same problem within OBJECTIVE_TOL of each other;
    # the duality gap criterion covers clamped corners, the equality band
    # enforces residual ~ 1 on interior coordinates
    b, _, _ = _fast.solve_simplex(
        dist.atoms, dist.weights, b0, 0.999 * tol, 0.45 * OBJECTIVE_TOL,
        max_iter, EPS_INTERIOR, eq_tol=0.9e-6,
    )
    return Portfolio(b)


def solve_array(atoms: np.ndarray, weights: np.ndarray, start: np.ndarray,
                tol: float = KT_TOL, obj_tol: float | None = None,
                max_iter: int = SOLVER_MAX_ITER) -> np.ndarray:
    """Unchecked array-in/array-out solve for strategy inner loops."""
    b, _, _ = _fast.solve_simplex(
        atoms, weights, start, 0.999 * tol,
        0.999 * tol if obj_tol is None else obj_tol,
        max_iter, EPS_INTERIOR,
    )
    return b


def growth_decomposition_check(b1, b2, path) -> float:
    """|growth-rate difference on raw returns - same on normalized returns|.

    The two sides are computed independently; by the normalization identity
    they agree up to rounding (contract: <= 1e-10 * n).
    """
    w1 = _portfolio_vector(b1)
    w2 = _portfolio_vector(b2)
    x = path.x_matrix if isinstance(path, MarketPath) else np.asarray(path, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionMismatch("path returns must form an (n, m) matrix")
    n, m = x.shape
    if w1.size != m or w2.size != m:
        raise DimensionMismatch("portfolio dimension does not match the path")
    raw = (np.log(x @ w1).sum() - np.log(x @ w2).sum()) / n
    u = x / x.mean(axis=1, keepdims=True)
    norm = (np.log(u @ w1).sum() - np.log(u @ w2).sum()) / n
    return float(abs(raw - norm))
