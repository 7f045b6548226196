"""Sequential portfolio strategies behind one causal interface.

Every strategy is stepped the same way: `reset(m, k)` binds dimensions,
then for each period n the runner calls `next_portfolio(y_n)` (side info
for the current period is visible, the period's returns are not) and,
once the returns realize, `update(x_n)`.  The interface never exposes the
current X, which enforces causality by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _fast
from .errors import (
    ConfigError,
    DimensionMismatch,
    GrowthLabError,
    ShapeMismatch,
)
from .logopt import (
    EPS_INTERIOR,
    KT_TOL,
    OBJECTIVE_TOL,
    SOLVER_MAX_ITER,
    EmpiricalDistribution,
    Portfolio,
    normalize_vector,
    solve_array,
)
from .market import (
    IID,
    MIXTURE,
    MarketSpec,
    conditional_next,
    stationary_atom_marginal,
)

DEFAULT_LEVELS = 10
DEFAULT_MAX_ORDER = 3
WIDTH_SAMPLE = 200


def _finalize(b: np.ndarray) -> np.ndarray:
    w = np.maximum(b, EPS_INTERIOR)
    return w / w.sum()


def _wealth_weights(logw: np.ndarray) -> np.ndarray:
    z = logw - logw.max()
    e = np.exp(z)
    return e / e.sum()


class StrategyState:
    """Base class: a stateful, causally-stepped portfolio policy."""

    name = "strategy"

    def __init__(self):
        self._m = None
        self._k = None

    def reset(self, m: int, k: int = 0) -> None:
        """Bind market dimensions and clear all internal state."""
        if m < 2:
            raise DimensionMismatch("strategies need m >= 2 assets")
        self._m = int(m)
        self._k = int(k)

    def next_portfolio(self, side=None) -> np.ndarray:
        raise NotImplementedError

    def update(self, returns) -> None:
        raise NotImplementedError

    def optimized_pairs(self):
        """(portfolio, distribution) pairs solved at the current step.

        None means the strategy never optimizes an explicit distribution
        (constant, universal cover); an empty list means nothing was
        optimized at this particular step.
        """
        return None

    def to_config(self) -> dict:
        return {"name": self.name}

    def _require_bound(self):
        if self._m is None:
            raise GrowthLabError(f"{self.name}: call reset(m, k) before stepping")


# ---------------------------------------------------------------------------
# constant and oracle strategies


class ConstantStrategy(StrategyState):
    """The same portfolio re-applied (rebalanced to) every period."""

    name = "constant"

    def __init__(self, b):
        super().__init__()
        w = b.weights if isinstance(b, Portfolio) else Portfolio(b).weights
        self._w = np.array(w)
        self.reset(self._w.size)

    def reset(self, m, k=0):
        super().reset(m, k)
        if self._w.size != m:
            raise DimensionMismatch(f"constant portfolio has m={self._w.size}, path has m={m}")

    def next_portfolio(self, side=None):
        self._require_bound()
        return self._w

    def update(self, returns):
        pass

    def to_config(self):
        return {"name": self.name, "weights": [float(v) for v in self._w]}


def constant_strategy(b) -> ConstantStrategy:
    return ConstantStrategy(b)


class OracleLogOptimal(StrategyState):
    """Log-optimal oracle: solves the true conditional at every step.

    Uses the generating spec (oracle privilege) to fetch the exact
    distribution of the next joint atom given the visible atom history,
    marginalizes it to returns vectors and solves for the log-optimal
    portfolio.  For the first steps of a Markov path the conditional is
    obtained by filtering over the latent initial h-tuple.
    """

    name = "oracle_log_optimal"

    def __init__(self, spec: MarketSpec, mode_id: int = 0):
        super().__init__()
        if spec.kind == MIXTURE:
            if not (0 <= mode_id < len(spec.components)):
                raise DimensionMismatch(f"mode_id {mode_id} is not a component of the mixture")
            self._component = spec.components[mode_id]
        else:
            if mode_id != 0:
                raise DimensionMismatch("mode_id must be 0 for non-mixture specs")
            self._component = spec
        self.spec = spec
        self.mode_id = int(mode_id)
        self.reset(self._component.m, self._component.k)

    def reset(self, m, k=0):
        super().reset(m, k)
        comp = self._component
        if m != comp.m or k != comp.k:
            raise DimensionMismatch("oracle spec dimensions do not match the path")
        self._history: list[int] = []
        self._cache: dict = {}
        self._pending_y = None
        self._last_b = np.full(m, 1.0 / m)
        self._current = None

    def _context_key(self):
        comp = self._component
        if comp.kind == IID:
            return ()
        h = comp.order
        if len(self._history) >= h:
            return tuple(self._history[-h:])
        return ("partial", tuple(self._history))

    def next_portfolio(self, side=None):
        self._require_bound()
        comp = self._component
        self._pending_y = np.asarray(() if side is None else side, dtype=np.float64).reshape(-1)
        key = self._context_key()
        hit = self._cache.get(key)
        if hit is None:
            cond = conditional_next(comp, self._history, allow_partial=True)
            probs = np.bincount(
                comp.x_group_of_atom, weights=cond, minlength=comp.x_group_matrix.shape[0]
            )
            probs = probs / probs.sum()
            b = solve_array(comp.x_group_matrix, probs, self._last_b.copy())
            hit = (b, probs)
            self._cache[key] = hit
        self._last_b = hit[0]
        self._current = hit
        return hit[0]

    def update(self, returns):
        comp = self._component
        x = np.asarray(returns, dtype=np.float64).reshape(-1)
        self._history.append(comp.atom_index(x, self._pending_y))

    def optimized_pairs(self):
        if self._current is None:
            return []
        b, probs = self._current
        return [(b, EmpiricalDistribution(self._component.x_group_matrix, probs))]


def oracle_log_optimal(spec: MarketSpec, mode_id: int = 0) -> OracleLogOptimal:
    return OracleLogOptimal(spec, mode_id)


class OracleModeConstant(StrategyState):
    """The mode's optimal constant portfolio: solve over its stationary marginal."""

    name = "oracle_mode_constant"

    def __init__(self, spec: MarketSpec, mode_id: int = 0):
        super().__init__()
        if spec.kind == MIXTURE:
            if not (0 <= mode_id < len(spec.components)):
                raise DimensionMismatch(f"mode_id {mode_id} is not a component of the mixture")
            component = spec.components[mode_id]
        else:
            if mode_id != 0:
                raise DimensionMismatch("mode_id must be 0 for non-mixture specs")
            component = spec
        self.spec = spec
        self.mode_id = int(mode_id)
        self._component = component
        atom_probs = stationary_atom_marginal(component)  # may raise NotConverged
        probs = np.bincount(
            component.x_group_of_atom, weights=atom_probs,
            minlength=component.x_group_matrix.shape[0],
        )
        self._probs = probs / probs.sum()
        self._w = solve_array(
            component.x_group_matrix, self._probs, np.full(component.m, 1.0 / component.m)
        )
        self.reset(component.m, component.k)

    def reset(self, m, k=0):
        super().reset(m, k)
        if m != self._component.m:
            raise DimensionMismatch("oracle spec dimensions do not match the path")

    def next_portfolio(self, side=None):
        self._require_bound()
        return self._w

    def update(self, returns):
        pass

    def optimized_pairs(self):
        return [(self._w, EmpiricalDistribution(self._component.x_group_matrix, self._probs))]


def oracle_mode_constant(spec: MarketSpec, mode_id: int = 0) -> OracleModeConstant:
    return OracleModeConstant(spec, mode_id)


# ---------------------------------------------------------------------------
# market-knowledge-free learners


class UniversalCover(StrategyState):
    """Wealth-weighted average over a fixed Monte Carlo panel of constants.

    Approximates the simplex integral of b * S_{n-1}(b) under the uniform
    density with a panel of `mc_samples` Dirichlet(1,...,1) points drawn
    once at reset; each point's cumulative wealth is tracked in log domain.
    """

    name = "universal_cover"

    def __init__(self, mc_samples: int = 100_000, seed: int = 0):
        super().__init__()
        if mc_samples < 1:
            raise DimensionMismatch("mc_samples must be >= 1")
        self.mc_samples = int(mc_samples)
        self.seed = int(seed)

    def reset(self, m, k=0):
        super().reset(m, k)
        gen = np.random.default_rng(self.seed)
        self._panel = gen.dirichlet(np.ones(m), size=self.mc_samples)
        self._logw = np.zeros(self.mc_samples)
        self._logr_cache: dict[bytes, np.ndarray] = {}
        self._t = 0

    def next_portfolio(self, side=None):
        self._require_bound()
        if self._t == 0:
            return np.full(self._m, 1.0 / self._m)
        w = _wealth_weights(self._logw)
        return _finalize(w @ self._panel)

    def update(self, returns):
        x = np.ascontiguousarray(np.asarray(returns, dtype=np.float64).reshape(-1))
        key = x.tobytes()
        logr = self._logr_cache.get(key)
        if logr is None:
            logr = np.log(self._panel @ x)
            self._logr_cache[key] = logr
        self._logw = self._logw + logr
        self._t += 1

    @property
    def panel(self) -> np.ndarray:
        return self._panel

    @property
    def log_component_wealth(self) -> np.ndarray:
        return self._logw

    def to_config(self):
        return {"name": self.name, "mc_samples": self.mc_samples, "seed": self.seed}


def universal_cover(mc_samples: int = 100_000, seed: int = 0) -> UniversalCover:
    return UniversalCover(mc_samples, seed)


class EmpiricalLogOptimal(StrategyState):
    """Follow-the-leader over the empirical distribution of normalized returns.

    At step n solves the log-optimal problem for the uniform empirical
    distribution of u(X_1)...u(X_{n-1}); uses no side information.
    """

    name = "empirical_log_optimal"

    def __init__(self):
        super().__init__()

    def reset(self, m, k=0):
        super().reset(m, k)
        self._keys: dict[bytes, int] = {}
        self._atoms = np.empty((8, m))
        self._counts = np.zeros(8)
        self._n_atoms = 0
        self._t = 0
        self._last_b = np.full(m, 1.0 / m)
        self._current = None

    def _grow(self):
        cap = self._atoms.shape[0]
        if self._n_atoms == cap:
            atoms = np.empty((2 * cap, self._m))
            atoms[:cap] = self._atoms
            counts = np.zeros(2 * cap)
            counts[:cap] = self._counts
            self._atoms, self._counts = atoms, counts

    def next_portfolio(self, side=None):
        self._require_bound()
        if self._t == 0:
            self._current = None
            return np.full(self._m, 1.0 / self._m)
        atoms = self._atoms[: self._n_atoms]
        weights = self._counts[: self._n_atoms] / self._t
        # objective certified to half of OBJECTIVE_TOL so the incremental
        # output matches a from-scratch solve within the full budget
        b = solve_array(atoms, weights, self._last_b.copy(), obj_tol=0.45 * OBJECTIVE_TOL)
        self._last_b = b
        self._current = (b, weights.copy())
        return b

    def update(self, returns):
        u = np.ascontiguousarray(normalize_vector(np.asarray(returns, dtype=np.float64).reshape(-1)))
        key = u.tobytes()
        idx = self._keys.get(key)
        if idx is None:
            self._grow()
            idx = self._n_atoms
            self._keys[key] = idx
            self._atoms[idx] = u
            self._n_atoms += 1
        self._counts[idx] += 1.0
        self._t += 1

    def optimized_pairs(self):
        if self._current is None:
            return []
        b, weights = self._current
        return [(b, EmpiricalDistribution(self._atoms[: self._n_atoms].copy(), weights))]


def empirical_log_optimal() -> EmpiricalLogOptimal:
    return EmpiricalLogOptimal()


# ---------------------------------------------------------------------------
# kernel machinery


@dataclass(frozen=True)
class KernelParams:
    """Configuration of the kernel learners.

    h: Markov approximation order (context length); L: number of kernel
    widths c/l for l=1..L; c: base width (None = adapt to the data);
    H: largest order mixed by order_mixture.
    """

    h: int = 1
    L: int = DEFAULT_LEVELS
    c: float | None = None
    H: int | None = None

    def __post_init__(self):
        if self.L < 1:
            raise ConfigError("KernelParams.L must be >= 1")
        if self.c is not None and not (self.c > 0):
            raise ConfigError("KernelParams.c must be positive")
        if not (0 <= self.h):
            raise ConfigError("KernelParams.h must be >= 0")
        if self.H is None:
            object.__setattr__(self, "H", max(self.h, DEFAULT_MAX_ORDER))
        if self.h > self.H:
            raise ConfigError("KernelParams requires h <= H")


@dataclass(frozen=True)
class KernelMatchSet:
    """Time indices whose context window matched at width level l.

    Indices are 0-based positions into the observed returns sequence; the
    matched return of index j is X_{j+1} in 1-based paper time, so valid
    indices span h <= j <= n-2 (paper: h+1 <= i <= n-1).
    """

    indices: tuple[int, ...]
    width_level: int


def _context_vector(x_window: np.ndarray, y_window: np.ndarray) -> np.ndarray:
    """Flatten the stacked context layout (side row over returns row).

    The current period contributes only its side vector (the paper's zero
    block stands in for the unrealized return), so the Frobenius norm over
    the stacked matrices equals the euclidean norm of this concatenation.
    """
    return np.concatenate([y_window.reshape(-1), x_window.reshape(-1)])


def kernel_match(x_hist, y_hist, theta, h: int, l: int, c: float) -> KernelMatchSet:
    """All indices whose context lies within Frobenius distance c/l of theta.

    x_hist: (n-1, m) observed returns X_1..X_{n-1}; y_hist: (n, k) observed
    side vectors Y_1..Y_n; theta: (x_block (h, m), y_block (h+1, k)) pair
    or a flat context vector of matching length.
    """
    x = np.asarray(x_hist, dtype=np.float64)
    y = np.asarray(y_hist, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeMismatch("x_hist must be an (n-1, m) matrix")
    if y.ndim != 2:
        y = y.reshape(y.shape[0], -1)
    n = y.shape[0]
    m = x.shape[1]
    k = y.shape[1]
    if x.shape[0] != n - 1:
        raise ShapeMismatch(f"y_hist has n={n} rows so x_hist needs n-1={n - 1}, got {x.shape[0]}")
    if l < 1 or c <= 0:
        raise ShapeMismatch("need level l >= 1 and width c > 0")
    if n < h + 2:
        raise ShapeMismatch(f"kernel matching needs n >= h+2, got n={n} with h={h}")
    if isinstance(theta, (tuple, list)) and len(theta) == 2:
        xb = np.asarray(theta[0], dtype=np.float64).reshape(h, m)
        yb = np.asarray(theta[1], dtype=np.float64).reshape(h + 1, k)
        tv = _context_vector(xb, yb)
    else:
        tv = np.asarray(theta, dtype=np.float64).reshape(-1)
        if tv.size != h * m + (h + 1) * k:
            raise ShapeMismatch(
                f"theta has {tv.size} entries, expected h*m+(h+1)*k={h * m + (h + 1) * k}"
            )
    width = c / l
    hits = []
    for j in range(h, n - 1):
        ctx = _context_vector(x[j - h: j], y[j - h: j + 1])
        if np.sqrt(((ctx - tv) ** 2).sum()) <= width:
            hits.append(j)
    return KernelMatchSet(indices=tuple(hits), width_level=int(l))


class KernelStrategy(StrategyState):
    """Kernel-width mixture of estimated log-optimal strategies at fixed order h.

    Each width level l keeps the empirical conditional built from past
    periods whose context window fell within c/l of the current one and
    solves for its log-optimal portfolio; levels are combined by
    wealth-proportional weights.  Empty match sets fall back to the uniform
    portfolio with a point mass at (1,...,1) and that level's wealth is
    frozen for the step.
    """

    name = "kernel"

    def __init__(self, params: KernelParams | None = None, **kwargs):
        super().__init__()
        self.params = params if params is not None else KernelParams(**kwargs)

    @property
    def h(self) -> int:
        return self.params.h

    def reset(self, m, k=0):
        super().reset(m, k)
        h, L = self.params.h, self.params.L
        self._xs: list[np.ndarray] = []
        self._ys: list[np.ndarray] = []
        self._ctx_keys: dict[bytes, int] = {}
        d = h * m + (h + 1) * k
        self._ctx_dim = d
        self._ctx_mat = np.empty((8, d))
        self._n_ctx = 0
        self._u_keys: dict[bytes, int] = {}
        self._u_mat = np.empty((8, m))
        self._n_u = 0
        self._counts = np.zeros((8, 8))
        self._logw = np.zeros(L)
        self._levels = np.arange(1, L + 1, dtype=np.float64)
        self._level_bs = np.tile(np.full(m, 1.0 / m), (L, 1))
        self._level_empty = np.zeros(L, dtype=bool)
        self._level_weight_mat: np.ndarray | None = None
        self._level_n_u = 0
        self._warm_arr = np.full((8, L, m), 1.0 / m)
        self._pending_ctx: int | None = None
        self._width_dists: list[float] = []
        self._width_samples = 0
        self._c = self.params.c
        self._c_frozen = self.params.c is not None
        self._emitted = False

    # -- interning -----------------------------------------------------------

    def _intern_ctx(self, vec: np.ndarray) -> int:
        key = vec.tobytes()
        idx = self._ctx_keys.get(key)
        if idx is None:
            if self._n_ctx == self._ctx_mat.shape[0]:
                grown = np.empty((2 * self._n_ctx, self._ctx_dim))
                grown[: self._n_ctx] = self._ctx_mat
                self._ctx_mat = grown
                counts = np.zeros((2 * self._n_ctx, self._counts.shape[1]))
                counts[: self._n_ctx] = self._counts
                self._counts = counts
                warm = np.full((2 * self._n_ctx, self.params.L, self._m), 1.0 / self._m)
                warm[: self._n_ctx] = self._warm_arr
                self._warm_arr = warm
            idx = self._n_ctx
            self._ctx_keys[key] = idx
            self._ctx_mat[idx] = vec
            self._n_ctx += 1
        return idx

    def _intern_u(self, u: np.ndarray) -> int:
        key = u.tobytes()
        idx = self._u_keys.get(key)
        if idx is None:
            if self._n_u == self._u_mat.shape[0]:
                grown = np.empty((2 * self._n_u, self._m))
                grown[: self._n_u] = self._u_mat
                self._u_mat = grown
                counts = np.zeros((self._counts.shape[0], 2 * self._n_u))
                counts[:, : self._n_u] = self._counts
                self._counts = counts
            idx = self._n_u
            self._u_keys[key] = idx
            self._u_mat[idx] = u
            self._n_u += 1
        return idx

    def _observe_width_sample(self, vec: np.ndarray):
        # base width c adapts to the first WIDTH_SAMPLE observed contexts,
        # then freezes: 0.5 * median positive pairwise distance
        if self._c_frozen:
            return
        if self._width_samples > 0:
            prev = self._ctx_instances[: self._width_samples]
            dists = np.sqrt(((prev - vec) ** 2).sum(axis=1))
            self._width_dists.extend(float(v) for v in dists if v > 0.0)
        else:
            self._ctx_instances = np.empty((WIDTH_SAMPLE, self._ctx_dim))
        self._ctx_instances[self._width_samples] = vec
        self._width_samples += 1
        if self._width_dists:
            self._c = 0.5 * float(np.median(self._width_dists))
        if self._width_samples >= WIDTH_SAMPLE:
            self._c_frozen = True

    def _context_at(self, j: int, current_y: np.ndarray | None = None) -> np.ndarray:
        h = self.params.h
        xw = np.concatenate([x.reshape(1, -1) for x in self._xs[j - h: j]]) if h else np.empty((0, self._m))
        if current_y is None:
            yw = self._ys[j - h: j + 1]
        else:
            yw = self._ys[j - h: j] + [current_y]
        yw = np.asarray(yw, dtype=np.float64).reshape(h + 1, self._k) if self._k else np.empty((h + 1, 0))
        return _context_vector(xw, yw)

    # -- stepping -------------------------------------------------------------

    def next_portfolio(self, side=None):
        self._require_bound()
        h, L = self.params.h, self.params.L
        m = self._m
        y = np.asarray(() if side is None else side, dtype=np.float64).reshape(-1)
        if y.size != self._k:
            raise DimensionMismatch(f"side info has k={y.size}, expected {self._k}")
        self._ys.append(y)
        t0 = len(self._xs)
        uniform = np.full(m, 1.0 / m)
        if t0 < h + 1:
            self._level_bs = np.tile(uniform, (L, 1))
            self._level_empty[:] = False
            self._level_weight_mat = None
            self._pending_ctx = None
            self._emitted = True
            return uniform

        theta = self._context_at(t0, current_y=y)
        ctx_idx = self._intern_ctx(theta)
        self._pending_ctx = ctx_idx

        width_base = self._c if self._c is not None else 1.0
        widths = width_base / self._levels
        if self._n_u > 0:
            bs, weight_mat, empty = _fast.kernel_levels(
                self._ctx_mat[: self._n_ctx],
                np.ascontiguousarray(self._counts[: self._n_ctx, : self._n_u]),
                self._u_mat[: self._n_u],
                theta,
                widths,
                self._warm_arr[ctx_idx],
                0.999 * KT_TOL,
                0.999 * KT_TOL,
                SOLVER_MAX_ITER,
                EPS_INTERIOR,
            )
            if not empty.all():
                keep = ~empty
                self._warm_arr[ctx_idx][keep] = bs[keep]
        else:
            bs = np.tile(uniform, (L, 1))
            weight_mat = None
            empty = np.ones(L, dtype=bool)
        self._level_bs = bs
        self._level_empty = empty
        self._level_weight_mat = weight_mat
        self._level_n_u = self._n_u
        self._emitted = True
        mix = _wealth_weights(self._logw)
        return _finalize(mix @ bs)

    def update(self, returns):
        x = np.ascontiguousarray(np.asarray(returns, dtype=np.float64).reshape(-1))
        if not self._emitted:
            raise GrowthLabError("update() called before next_portfolio()")
        h = self.params.h
        # component wealths: frozen on empty-match steps by convention
        logret = np.log(self._level_bs @ x)
        self._logw = self._logw + np.where(self._level_empty, 0.0, logret)
        t0 = len(self._xs)
        if t0 >= h:
            if self._pending_ctx is not None:
                ctx_idx = self._pending_ctx
                vec = self._ctx_mat[ctx_idx]
            else:
                vec = self._context_at(t0)
                ctx_idx = self._intern_ctx(vec)
            self._observe_width_sample(vec)
            u_idx = self._intern_u(normalize_vector(x))
            self._counts[ctx_idx, u_idx] += 1.0
        self._xs.append(x)
        self._pending_ctx = None
        self._emitted = False

    def optimized_pairs(self):
        pairs = []
        for li in range(self.params.L):
            if self._level_empty[li]:
                if self._level_weight_mat is not None or self._n_u == 0:
                    dirac = EmpiricalDistribution(np.ones((1, self._m)), np.array([1.0]))
                    pairs.append((self._level_bs[li], dirac))
                continue
            if self._level_weight_mat is None:
                continue
            dist = EmpiricalDistribution(
                self._u_mat[: self._level_n_u].copy(), self._level_weight_mat[li]
            )
            pairs.append((self._level_bs[li], dist))
        return pairs

    @property
    def log_component_wealth(self) -> np.ndarray:
        return self._logw

    def to_config(self):
        cfg = {"name": self.name, "h": self.params.h, "levels": self.params.L}
        if self.params.c is not None:
            cfg["width"] = float(self.params.c)
        return cfg


def kernel_strategy(params: KernelParams | None = None, **kwargs) -> KernelStrategy:
    return KernelStrategy(params, **kwargs)


class OrderMixture(StrategyState):
    """Wealth-proportional mixture of kernel strategies of orders 0..H."""

    name = "order_mixture"

    def __init__(self, params: KernelParams | None = None, **kwargs):
        super().__init__()
        self.params = params if params is not None else KernelParams(**kwargs)
        if self.params.H < 0:
            raise ConfigError("order_mixture needs H >= 0")

    def reset(self, m, k=0):
        super().reset(m, k)
        p = self.params
        self._components = [
            KernelStrategy(KernelParams(h=h, L=p.L, c=p.c, H=max(h, p.H)))
            for h in range(p.H + 1)
        ]
        for comp in self._components:
            comp.reset(m, k)
        self._logw = np.zeros(p.H + 1)
        self._component_bs = np.tile(np.full(m, 1.0 / m), (p.H + 1, 1))

    def next_portfolio(self, side=None):
        self._require_bound()
        bs = np.stack([comp.next_portfolio(side) for comp in self._components])
        self._component_bs = bs
        mix = _wealth_weights(self._logw)
        return _finalize(mix @ bs)

    def update(self, returns):
        x = np.asarray(returns, dtype=np.float64).reshape(-1)
        # order-level wealths always track the realized market
        self._logw = self._logw + np.log(self._component_bs @ x)
        for comp in self._components:
            comp.update(x)

    def optimized_pairs(self):
        pairs = []
        for comp in self._components:
            pairs.extend(comp.optimized_pairs())
        return pairs

    @property
    def log_component_wealth(self) -> np.ndarray:
        return self._logw

    @property
    def components(self) -> Sequence[KernelStrategy]:
        return tuple(self._components)

    def to_config(self):
        cfg = {"name": self.name, "max_order": self.params.H, "levels": self.params.L}
        if self.params.c is not None:
            cfg["width"] = float(self.params.c)
        return cfg


def order_mixture(params: KernelParams | None = None, **kwargs) -> OrderMixture:
    return OrderMixture(params, **kwargs)


# ---------------------------------------------------------------------------
# config-driven construction


def build_strategy(config: dict, spec: MarketSpec | None = None, mode_id: int = 0) -> StrategyState:
    """Construct a strategy from its JSON form {name, params...}.

    Oracle strategies need the generating spec; the runner passes the
    path's spec and mode.
    """
    if "name" not in config:
        raise ConfigError("strategy config needs a 'name'")
    name = config["name"]
    params = {key: value for key, value in config.items() if key != "name"}
    try:
        if name == "constant":
            return constant_strategy(np.asarray(params.pop("weights"), dtype=np.float64))
        if name == "oracle_log_optimal":
            if spec is None:
                raise ConfigError("oracle_log_optimal needs the generating market spec")
            return oracle_log_optimal(spec, mode_id)
        if name == "oracle_mode_constant":
            if spec is None:
                raise ConfigError("oracle_mode_constant needs the generating market spec")
            return oracle_mode_constant(spec, mode_id)
        if name == "universal_cover":
            return universal_cover(int(params.pop("mc_samples", 100_000)), int(params.pop("seed", 0)))
        if name == "empirical_log_optimal":
            return empirical_log_optimal()
        if name == "kernel":
            kp = KernelParams(
                h=int(params.pop("h", 1)),
                L=int(params.pop("levels", DEFAULT_LEVELS)),
                c=params.pop("width", None),
                H=max(int(config.get("h", 1)), DEFAULT_MAX_ORDER),
            )
            return kernel_strategy(kp)
        if name == "order_mixture":
            H = int(params.pop("max_order", DEFAULT_MAX_ORDER))
            kp = KernelParams(
                h=0,
                L=int(params.pop("levels", DEFAULT_LEVELS)),
                c=params.pop("width", None),
                H=H,
            )
            return order_mixture(kp)
    except KeyError as exc:
        raise ConfigError(f"strategy {name!r} is missing parameter {exc}") from exc
    raise ConfigError(f"unknown strategy name {name!r}")
