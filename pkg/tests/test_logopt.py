"""Normalization and log-optimal solver tests.

Derived expectations are computed in-test by independent means: direct
arithmetic, closed-form first-order conditions, and dense grid search.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import growthlab as gl
from growthlab.errors import DimensionMismatch, EmptyDistribution, NonPositiveInput
from growthlab.logopt import EmpiricalDistribution

from conftest import DN, UP, kelly_spec


def kelly_dist():
    return EmpiricalDistribution(np.array([UP, DN]), np.array([0.5, 0.5]))


def grid_search_2asset(dist, step=1e-4):
    """Independent oracle: dense scan of b1 over [0, 1]."""
    grid = np.arange(0.0, 1.0 + step, step)
    obj = dist.weights @ np.log(
        np.outer(dist.atoms[:, 0], grid) + np.outer(dist.atoms[:, 1], 1.0 - grid) + 1e-300
    )
    best = int(np.argmax(obj))
    return grid[best], float(obj[best])


# ---------------------------------------------------------------------------
# normalize


def test_normalize_symmetric_identity():
    u = gl.normalize((1.0, 1.0))
    np.testing.assert_array_equal(u.values, [1.0, 1.0])


def test_normalize_two_one():
    # <b_hat, x> = 1.5 -> u = (4/3, 2/3)
    u = gl.normalize((2.0, 1.0))
    np.testing.assert_allclose(u.values, [4 / 3, 2 / 3], rtol=0, atol=1e-15)


def test_normalize_rejects_nonpositive():
    with pytest.raises(NonPositiveInput):
        gl.normalize((3.0, 0.0))


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.floats(min_value=1e-6, max_value=1e6), min_size=2, max_size=6),
    st.floats(min_value=1e-6, max_value=1e6),
)
def test_normalize_idempotent_and_scale_invariant(values, scale):
    x = np.asarray(values)
    u = gl.normalize(x).values
    again = gl.normalize(u).values
    np.testing.assert_allclose(again, u, rtol=0, atol=1e-12)
    scaled = gl.normalize(scale * x).values
    np.testing.assert_allclose(scaled, u, rtol=1e-12, atol=1e-12)
    assert abs(u.mean() - 1.0) <= 1e-12
    assert np.all(u > 0) and np.all(u <= x.size * (1 + 1e-12))


# ---------------------------------------------------------------------------
# expected log return


def test_expected_log_return_zero_on_ones():
    dist = EmpiricalDistribution(np.ones((3, 2)), np.full(3, 1 / 3))
    assert gl.expected_log_return((0.5, 0.5), dist) == 0.0


def test_expected_log_return_kelly_value():
    # 0.5 log 1.5 + 0.5 log 0.75 = 0.5 log 1.125
    val = gl.expected_log_return((0.5, 0.5), kelly_dist())
    assert abs(val - (0.5 * math.log(1.5) + 0.5 * math.log(0.75))) < 1e-15
    assert abs(val - 0.05889151782819171) < 1e-12


def test_expected_log_return_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        gl.expected_log_return((0.5, 0.25, 0.25), kelly_dist())


# ---------------------------------------------------------------------------
# solver


def test_solver_single_flat_atom_ties_to_uniform():
    dist = EmpiricalDistribution(np.array([[1.0, 1.0]]), np.array([1.0]))
    b = gl.solve_log_optimal(dist)
    np.testing.assert_array_equal(b.weights, [0.5, 0.5])


def test_solver_kelly_closed_form():
    # first-order condition 0.5*2/(1+b) = 0.5*0.5/(1-b/2) solves to b = 0.5
    b = gl.solve_log_optimal(kelly_dist())
    np.testing.assert_allclose(b.weights, [0.5, 0.5], atol=1e-7)


def test_solver_dominant_asset_clamps():
    dist = EmpiricalDistribution(np.array([UP, UP]), np.array([0.5, 0.5]))
    b = gl.solve_log_optimal(dist)
    # KT stop at tol=1e-8 bounds the defect from the eps-clamped corner
    assert b.weights[0] >= 1.0 - 5e-8
    assert b.weights[1] <= 5e-8
    corner = np.array([1.0 - gl.EPS_INTERIOR, gl.EPS_INTERIOR])
    f_corner = float(dist.weights @ np.log(dist.atoms @ corner))
    assert gl.expected_log_return(b, dist) >= f_corner - 1e-10


def test_solver_empty_distribution():
    with pytest.raises((EmptyDistribution, NonPositiveInput)):
        EmpiricalDistribution(np.empty((0, 2)), np.empty(0))
    with pytest.raises(EmptyDistribution):
        gl.solve_log_optimal("nope")


def test_solver_matches_grid_search_family():
    rng = np.random.default_rng(2024)
    for _ in range(60):
        n_atoms = int(rng.integers(1, 5))
        atoms = rng.uniform(0.2, 4.0, size=(n_atoms, 2))
        weights = rng.dirichlet(np.ones(n_atoms))
        dist = EmpiricalDistribution(atoms, weights)
        b = gl.solve_log_optimal(dist)
        _, f_grid = grid_search_2asset(dist)
        f_solver = gl.expected_log_return(b, dist)
        assert f_solver >= f_grid - 1e-6
        assert gl.kt_residuals(b, dist).max() <= 1.0 + 1e-8


def test_solver_deterministic():
    dist = kelly_dist()
    a = gl.solve_log_optimal(dist).weights
    b = gl.solve_log_optimal(dist).weights
    assert a.tobytes() == b.tobytes()


def test_solver_warm_start_agrees_in_objective():
    dist = kelly_dist()
    cold = gl.solve_log_optimal(dist)
    warm = gl.solve_log_optimal(dist, start=(0.9, 0.1))
    assert abs(
        gl.expected_log_return(cold, dist) - gl.expected_log_return(warm, dist)
    ) <= 1e-10


# ---------------------------------------------------------------------------
# KT residuals


def test_kt_residuals_kelly_at_optimum():
    # (0.5*2/1.5 + 0.5*0.5/0.75, 0.5*1/1.5 + 0.5*1/0.75) = (1, 1)
    res = gl.kt_residuals((0.5, 0.5), kelly_dist())
    np.testing.assert_allclose(res, [1.0, 1.0], atol=1e-15)


def test_kt_residuals_flat_atom():
    dist = EmpiricalDistribution(np.array([[1.0, 1.0]]), np.array([1.0]))
    np.testing.assert_allclose(gl.kt_residuals((0.5, 0.5), dist), [1.0, 1.0], atol=1e-15)


def test_kt_residuals_detect_suboptimal_portfolio():
    res = gl.kt_residuals((0.9, 0.1), kelly_dist())
    # asset-2 residual = 0.5/1.9 + 0.5/0.55 ~ 1.172 > 1
    assert abs(res[1] - (0.5 / 1.9 + 0.5 / 0.55)) < 1e-15
    assert res.max() > 1.0


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=10**6))
def test_kt_certificate_property_random_dists(n_atoms, seed):
    rng = np.random.default_rng(seed)
    atoms = rng.uniform(0.05, 20.0, size=(n_atoms, 3))
    weights = rng.dirichlet(np.ones(n_atoms))
    dist = EmpiricalDistribution(atoms, weights)
    b = gl.solve_log_optimal(dist)
    res = gl.kt_residuals(b, dist)
    assert res.max() <= 1.0 + 1e-8
    # residual ~ 1 on every coordinate holding interior weight
    interior = b.weights > 10 * gl.EPS_INTERIOR
    assert np.all(res[interior] >= 1.0 - 1e-6)


# ---------------------------------------------------------------------------
# normalization identity and bounds


def test_growth_decomposition_identical_strategies_zero(kelly):
    path = gl.sample_path(kelly, 100, 5)
    assert gl.growth_decomposition_check((0.5, 0.5), (0.5, 0.5), path) == 0.0


def test_growth_decomposition_seeded_path(kelly):
    path = gl.sample_path(kelly, 1000, 5)
    assert gl.growth_decomposition_check((0.7, 0.3), (0.3, 0.7), path) <= 1e-7


def test_growth_decomposition_single_atom_path():
    spec = gl.build_iid([((1.5, 0.5), ())], [1.0])
    path = gl.sample_path(spec, 50, 1)
    assert gl.growth_decomposition_check((0.5, 0.5), (0.2, 0.8), path) <= 1e-10 * path.n


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=5), st.integers(min_value=0, max_value=10**6))
def test_optimal_normalized_growth_bounded_by_log_m(n_atoms, seed):
    # 0 <= max E log<b, U> <= log m for distributions over normalized returns
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 5))
    raw = rng.uniform(0.1, 10.0, size=(n_atoms, m))
    u = raw / raw.mean(axis=1, keepdims=True)
    dist = EmpiricalDistribution(u, rng.dirichlet(np.ones(n_atoms)))
    val = gl.expected_log_return(gl.solve_log_optimal(dist), dist)
    assert -1e-12 <= val <= math.log(m) + 1e-12


def test_argmax_invariant_under_normalization():
    rng = np.random.default_rng(99)
    for _ in range(20):
        n_atoms = int(rng.integers(1, 5))
        atoms = rng.uniform(0.2, 4.0, size=(n_atoms, 2))
        weights = rng.dirichlet(np.ones(n_atoms))
        raw = EmpiricalDistribution(atoms, weights)
        norm = EmpiricalDistribution(atoms / atoms.mean(axis=1, keepdims=True), weights)
        b_raw = gl.solve_log_optimal(raw)
        b_norm = gl.solve_log_optimal(norm)
        # maximizers may differ; achieved objectives agree on either atom set
        assert abs(
            gl.expected_log_return(b_raw, norm) - gl.expected_log_return(b_norm, norm)
        ) <= 1e-8
        assert abs(
            gl.expected_log_return(b_raw, raw) - gl.expected_log_return(b_norm, raw)
        ) <= 1e-8


def test_portfolio_validation():
    with pytest.raises(NonPositiveInput):
        gl.Portfolio((1.0, 0.0))
    with pytest.raises(DimensionMismatch):
        gl.Portfolio((0.6, 0.6))
    assert gl.uniform_portfolio(4).weights.sum() == 1.0
