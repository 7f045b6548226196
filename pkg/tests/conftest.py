"""Shared market fixtures and session-scoped experiment panels.

The heavy 1e5-step panels are computed once per session and shared
between the invariant tests and the acceptance suite.
"""

import numpy as np
import pytest

import growthlab as gl

UP = (2.0, 1.0)
DN = (0.5, 1.0)

PANEL_SEEDS = tuple(range(1, 21))
PANEL_GRID = tuple(int(v) for v in np.unique(np.geomspace(100, 100000, 13).astype(int)))


def kelly_spec():
    """Coin-flip market: double-or-halve asset vs cash, fair coin."""
    return gl.build_iid([(UP, ()), (DN, ())], [0.5, 0.5])


def coupled_markov_spec():
    """4-atom order-1 chain, side info coupled to returns within the step.

    The side values are persistent and correlated with the sign of the
    current return; the conditional probability of an 'up' move depends
    only weakly on the previous side value (0.56 vs 0.54), so the
    conditional optima hover near the stationary one.
    """
    atoms = [(UP, (1.0,)), (UP, (-1.0,)), (DN, (1.0,)), (DN, (-1.0,))]
    row_plus = [0.448, 0.112, 0.22, 0.22]
    row_minus = [0.27, 0.27, 0.092, 0.368]
    transition = {(0,): row_plus, (1,): row_minus, (2,): row_plus, (3,): row_minus}
    return gl.build_markov(atoms, 1, transition)


def lagged_tag_markov_spec():
    """4-atom order-1 chain where the side value tags the previous move.

    Y_n = 1 iff X_{n-1} was 'up', so side info adds nothing beyond the
    atom history, while the conditional up-probability swings hard
    (0.7 after up, 0.35 after down): a market the kernel learner must
    actually learn.
    """
    atoms = [(UP, (1.0,)), (DN, (1.0,)), (UP, (0.0,)), (DN, (0.0,))]
    transition = {
        (0,): [0.7, 0.3, 0.0, 0.0],
        (1,): [0.0, 0.0, 0.35, 0.65],
        (2,): [0.7, 0.3, 0.0, 0.0],
        (3,): [0.0, 0.0, 0.35, 0.65],
    }
    return gl.build_markov(atoms, 1, transition)


def balanced_coupled_spec():
    """Zero-gap variant: joint conditionals vary, X-marginals are exactly equal.

    Transition rows use dyadic probabilities whose returns-marginal is
    exactly (0.5, 0.5) in floating point for every state, so the
    conditional optimum coincides with the stationary one bit-for-bit.
    """
    atoms = [(UP, (1.0,)), (UP, (-1.0,)), (DN, (1.0,)), (DN, (-1.0,))]
    row_plus = [0.375, 0.125, 0.125, 0.375]
    row_minus = [0.125, 0.375, 0.375, 0.125]
    transition = {(0,): row_plus, (1,): row_minus, (2,): row_plus, (3,): row_minus}
    return gl.build_markov(atoms, 1, transition)


def two_mode_mixture_spec():
    """Two i.i.d. Kelly-type modes with distinct interior optima."""
    a = gl.build_iid([(UP, ()), (DN, ())], [0.6, 0.4])
    b = gl.build_iid([(UP, ()), (DN, ())], [0.4, 0.6])
    return gl.build_mixture([a, b], [0.5, 0.5])


def two_cycle_spec():
    """Deterministic alternating market (period-2 chain)."""
    return gl.build_markov([(UP, ()), (DN, ())], 1, [[0.0, 1.0], [1.0, 0.0]])


@pytest.fixture(scope="session")
def kelly():
    return kelly_spec()


@pytest.fixture(scope="session")
def coupled_spec():
    return coupled_markov_spec()


@pytest.fixture(scope="session")
def lagged_spec():
    return lagged_tag_markov_spec()


@pytest.fixture(scope="session")
def mixture_spec():
    return two_mode_mixture_spec()


def _grid_index(grid):
    return np.asarray(grid, dtype=np.int64) - 1


_PANEL_CACHE: dict = {}


def get_coupled_panel():
    """20 seeds x 1e5 steps on the coupled chain: oracle, constant, empirical.

    Growth-rate series sampled on PANEL_GRID, one row per seed; computed
    once per session and shared by acceptance and invariant tests.
    """
    if "coupled" in _PANEL_CACHE:
        return _PANEL_CACHE["coupled"]
    spec = coupled_markov_spec()
    idx = _grid_index(PANEL_GRID)
    rows = {"oracle": [], "const": [], "empirical": []}
    for seed in PANEL_SEEDS:
        path = gl.sample_path(spec, 100_000, seed)
        rows["oracle"].append(gl.run_strategy(gl.oracle_log_optimal(spec), path).growth_rate[idx])
        rows["const"].append(gl.run_strategy(gl.oracle_mode_constant(spec), path).growth_rate[idx])
        rows["empirical"].append(gl.run_strategy(gl.empirical_log_optimal(), path).growth_rate[idx])
    _PANEL_CACHE["coupled"] = {
        "spec": spec,
        "grid": PANEL_GRID,
        "oracle": np.array(rows["oracle"]),
        "const": np.array(rows["const"]),
        "empirical": np.array(rows["empirical"]),
    }
    return _PANEL_CACHE["coupled"]


def get_mixture_panel():
    """20 seeds x 1e5 steps on the two-mode mixture: empirical vs mode optimum."""
    if "mixture" in _PANEL_CACHE:
        return _PANEL_CACHE["mixture"]
    spec = two_mode_mixture_spec()
    final_w_emp, final_w_const, emp_b, mode_b = [], [], [], []
    for seed in PANEL_SEEDS:
        path = gl.sample_path(spec, 100_000, seed)
        strat = gl.empirical_log_optimal()
        led = gl.run_strategy(strat, path)
        final_w_emp.append(led.final_growth_rate())
        emp_b.append(strat.next_portfolio(np.empty(0)).copy())
        const = gl.oracle_mode_constant(spec, path.mode_id)
        final_w_const.append(gl.run_strategy(const, path).final_growth_rate())
        mode_b.append(const.next_portfolio(np.empty(0)).copy())
    _PANEL_CACHE["mixture"] = {
        "spec": spec,
        "w_emp": np.array(final_w_emp),
        "w_const": np.array(final_w_const),
        "emp_b": np.array(emp_b),
        "mode_b": np.array(mode_b),
    }
    return _PANEL_CACHE["mixture"]


def get_kernel_panel():
    """20 seeds x 2e4 steps: oracle, fixed-order kernel, order mixture."""
    if "kernel" in _PANEL_CACHE:
        return _PANEL_CACHE["kernel"]
    spec = lagged_tag_markov_spec()
    n = 20_000
    width = 2.0  # levels c/l for l>=3 are below the minimal positive
    # context distance (1.0), so exact matching is among the widths
    out = {"n": n, "kernel_vs_oracle": [], "mix_final": [], "mix_best_component": []}
    for seed in PANEL_SEEDS:
        path = gl.sample_path(spec, n, seed)
        led_o = gl.run_strategy(gl.oracle_log_optimal(spec), path)
        led_k = gl.run_strategy(gl.kernel_strategy(h=1, L=10, c=width), path)
        out["kernel_vs_oracle"].append(abs(led_k.final_growth_rate() - led_o.final_growth_rate()))
        mix = gl.order_mixture(gl.KernelParams(h=0, L=10, c=width, H=3))
        led_m = gl.run_strategy(mix, path)
        out["mix_final"].append(led_m.final_growth_rate())
        out["mix_best_component"].append(float(mix.log_component_wealth.max()) / n)
    out["kernel_vs_oracle"] = np.array(out["kernel_vs_oracle"])
    out["mix_final"] = np.array(out["mix_final"])
    out["mix_best_component"] = np.array(out["mix_best_component"])
    _PANEL_CACHE["kernel"] = out
    return out


@pytest.fixture(scope="session")
def coupled_panel():
    return get_coupled_panel()


@pytest.fixture(scope="session")
def mixture_panel():
    return get_mixture_panel()


@pytest.fixture(scope="session")
def kernel_panel():
    return get_kernel_panel()
