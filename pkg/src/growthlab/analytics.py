"""Wealth accounting and theorem-level diagnostics.

All accounting is in log domain (1e5-step products would under/overflow)
and every ledger is a pure function of (strategy, path), so recomputing a
ledger reproduces it bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import (
    DimensionMismatch,
    GrowthLabError,
    NotApplicable,
    PathMismatch,
)
from .logopt import EPS_INTERIOR, kt_residuals, _portfolio_vector
from .market import MarketPath, MarketSpec, sample_path
from .strategies import StrategyState, oracle_log_optimal
from .util import derive_seed

DEFAULT_CHECKPOINTS = (100, 1_000, 10_000, 100_000)
KT_CERT_TOL = 1e-6
PORTFOLIO_SUM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class WealthLedger:
    """Per-step log portfolio returns and derived growth series for one run."""

    strategy_name: str
    path_digest: str
    log_returns: np.ndarray
    cum_log_wealth: np.ndarray
    growth_rate: np.ndarray

    def __post_init__(self):
        n = self.log_returns.size
        if n == 0:
            raise DimensionMismatch("ledgers must cover at least one step")
        for field in ("log_returns", "cum_log_wealth", "growth_rate"):
            arr = np.ascontiguousarray(np.asarray(getattr(self, field), dtype=np.float64))
            if arr.size != n:
                raise DimensionMismatch("ledger series must have equal length")
            arr.setflags(write=False)
            object.__setattr__(self, field, arr)

    @property
    def n(self) -> int:
        return self.log_returns.size

    def final_growth_rate(self) -> float:
        return float(self.growth_rate[-1])


@dataclass(frozen=True, eq=False)
class ComparisonSeries:
    """Growth-rate differences W_n(A) - W_n(B) at increasing checkpoints."""

    name_a: str
    name_b: str
    path_digest: str
    n_grid: tuple[int, ...]
    diff: np.ndarray

    def __post_init__(self):
        grid = tuple(int(v) for v in self.n_grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise DimensionMismatch("checkpoints must be strictly increasing")
        arr = np.ascontiguousarray(np.asarray(self.diff, dtype=np.float64))
        if arr.size != len(grid):
            raise DimensionMismatch("one diff per checkpoint")
        if not np.all(np.isfinite(arr)):
            raise GrowthLabError("growth-rate differences must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "n_grid", grid)
        object.__setattr__(self, "diff", arr)


def run_strategy(strategy: StrategyState, path: MarketPath) -> WealthLedger:
    """Step a strategy causally along a path and account its wealth.

    The strategy is reset first, so running the same (strategy, path) pair
    twice reproduces the ledger exactly.
    """
    strategy.reset(path.m, path.k)
    x_mat = path.x_matrix
    y_mat = path.y_matrix
    n = path.n
    logs = np.empty(n)
    floor = EPS_INTERIOR * (1.0 - 1e-6)
    for i in range(n):
        b = strategy.next_portfolio(y_mat[i])
        if b.min() < floor or abs(b.sum() - 1.0) > PORTFOLIO_SUM_TOL:
            raise GrowthLabError(
                f"{strategy.name} emitted an invalid portfolio at step {i + 1}"
            )
        logs[i] = math.log(float(b @ x_mat[i]))
        strategy.update(x_mat[i])
    cum = np.cumsum(logs)
    growth = cum / np.arange(1, n + 1)
    return WealthLedger(
        strategy_name=strategy.name,
        path_digest=path.digest,
        log_returns=logs,
        cum_log_wealth=cum,
        growth_rate=growth,
    )


def checkpoints_for(n: int, checkpoints: Iterable[int] | None = None) -> tuple[int, ...]:
    grid = tuple(c for c in (checkpoints or DEFAULT_CHECKPOINTS) if 1 <= c <= n)
    return grid if grid else (n,)


def growth_diff(
    a: WealthLedger, b: WealthLedger, checkpoints: Iterable[int] | None = None
) -> ComparisonSeries:
    """W_n(A) - W_n(B) sampled at checkpoints; both runs must share the path."""
    if a.path_digest != b.path_digest or a.n != b.n:
        raise PathMismatch("ledgers were not produced on the same path")
    grid = checkpoints_for(a.n, checkpoints)
    idx = np.asarray(grid, dtype=np.int64) - 1
    return ComparisonSeries(
        name_a=a.strategy_name,
        name_b=b.strategy_name,
        path_digest=a.path_digest,
        n_grid=grid,
        diff=a.growth_rate[idx] - b.growth_rate[idx],
    )


def supermartingale_estimate(
    competitor: StrategyState,
    spec: MarketSpec,
    n: int,
    paths: int,
    seed: int,
) -> tuple[float, float]:
    """Monte Carlo E[S_n(competitor) / S_n(oracle log-optimal)] with stderr.

    The wealth-ratio process against the oracle is a supermartingale, so
    the mean must not exceed 1 beyond sampling noise.  Per-path seeds are
    derived from (seed, path index); aggregation uses exact summation so
    the result is order-independent.
    """
    if paths < 30:
        raise GrowthLabError("supermartingale_estimate needs paths >= 30")
    ratios = np.empty(paths)
    for p in range(paths):
        path = sample_path(spec, n, derive_seed(seed, p))
        oracle = oracle_log_optimal(spec, path.mode_id)
        led_c = run_strategy(competitor, path)
        led_o = run_strategy(oracle, path)
        ratios[p] = math.exp(led_c.cum_log_wealth[-1] - led_o.cum_log_wealth[-1])
    mean = math.fsum(ratios) / paths
    var = math.fsum((r - mean) ** 2 for r in ratios) / (paths - 1)
    stderr = math.sqrt(var / paths)
    return float(mean), float(stderr)


@dataclass(frozen=True)
class KTReport:
    """Kuhn-Tucker certificate of the portfolios a strategy optimized."""

    strategy_name: str
    steps: tuple[int, ...]
    max_residual: float
    threshold: float
    passed: bool


def default_step_sample(n: int) -> tuple[int, ...]:
    steps = sorted({min(s, n) for s in (1, 2, 3, 5, 10, 30, 100, 300, 1000, 3000, 10000, n)})
    return tuple(steps)


def kt_certificate(
    strategy: StrategyState,
    path: MarketPath,
    step_sample: Iterable[int] | None = None,
    threshold: float = 1.0 + KT_CERT_TOL,
) -> KTReport:
    """Replay a strategy and certify its solved portfolios at sampled steps.

    Raises NotApplicable for strategies that never optimize an explicit
    distribution (constant portfolios, the universal cover panel).
    """
    steps = tuple(sorted(set(step_sample))) if step_sample else default_step_sample(path.n)
    if any(s < 1 or s > path.n for s in steps):
        raise DimensionMismatch("sampled steps must lie within the path")
    strategy.reset(path.m, path.k)
    x_mat, y_mat = path.x_matrix, path.y_matrix
    wanted = set(steps)
    worst = -np.inf
    applicable = False
    for i in range(path.n):
        strategy.next_portfolio(y_mat[i])
        if (i + 1) in wanted:
            pairs = strategy.optimized_pairs()
            if pairs is None:
                raise NotApplicable(
                    f"{strategy.name} exposes no optimization distribution"
                )
            for b, dist in pairs:
                applicable = True
                worst = max(worst, float(kt_residuals(b, dist).max()))
        strategy.update(x_mat[i])
    if not applicable:
        worst = 1.0  # nothing was solved at the sampled steps
    return KTReport(
        strategy_name=strategy.name,
        steps=steps,
        max_residual=float(worst),
        threshold=float(threshold),
        passed=bool(worst <= threshold),
    )


def normalization_identity_report(path: MarketPath, b1, b2) -> float:
    """Max over all prefixes of |raw vs normalized growth-difference|.

    Vectorized form of growth_decomposition_check applied to every prefix
    of the path; the identity says the deviation is pure rounding noise.
    """
    w1 = _portfolio_vector(b1)
    w2 = _portfolio_vector(b2)
    x = path.x_matrix
    if x.shape[1] != w1.size or x.shape[1] != w2.size:
        raise DimensionMismatch("portfolio dimension does not match the path")
    u = x / x.mean(axis=1, keepdims=True)
    n = np.arange(1, x.shape[0] + 1)
    raw = (np.cumsum(np.log(x @ w1)) - np.cumsum(np.log(x @ w2))) / n
    norm = (np.cumsum(np.log(u @ w1)) - np.cumsum(np.log(u @ w2))) / n
    return float(np.abs(raw - norm).max())


@dataclass(frozen=True)
class AMGMMargins:
    """Quantities of the arithmetic/geometric-mean gap diagnostic."""

    excess: float        # sum a_i - n * geometric mean
    sqrt_spread: float   # max_{i,j} (sqrt(a_i) - sqrt(a_j))^2
    spread: float        # max_{i,j} |a_i - a_j|


def am_gm_margins(values) -> AMGMMargins:
    """Diagnostic margins for positive sequences.

    The bound `excess >= sqrt_spread` holds for every positive sequence;
    the stronger comparison against `spread` is meaningful for long,
    bounded sequences such as per-step return ratios.
    """
    a = np.asarray(values, dtype=np.float64).reshape(-1)
    if a.size < 2 or np.any(a <= 0) or not np.all(np.isfinite(a)):
        raise GrowthLabError("am_gm_margins needs >= 2 strictly positive values")
    n = a.size
    geo = math.exp(math.fsum(np.log(a)) / n)
    excess = math.fsum(a) - n * geo
    mx, mn = float(a.max()), float(a.min())
    return AMGMMargins(
        excess=float(excess),
        sqrt_spread=float((math.sqrt(mx) - math.sqrt(mn)) ** 2),
        spread=float(mx - mn),
    )


# ---------------------------------------------------------------------------
# plot-ready exports


def ledger_csv_rows(ledger: WealthLedger) -> Iterable[str]:
    yield "n,log_return,cum_log_wealth,growth_rate"
    for i in range(ledger.n):
        yield (
            f"{i + 1},{ledger.log_returns[i]:.17g},"
            f"{ledger.cum_log_wealth[i]:.17g},{ledger.growth_rate[i]:.17g}"
        )


def comparison_csv_rows(series: ComparisonSeries) -> Iterable[str]:
    yield "n,diff"
    for n, d in zip(series.n_grid, series.diff):
        yield f"{n},{d:.17g}"
