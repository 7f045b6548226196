"""Market construction, sampling and oracle-conditional tests."""

import json

import numpy as np
import pytest

import growthlab as gl
from growthlab.errors import (
    DimensionMismatch,
    HistoryTooShort,
    InvalidProbability,
    MissingTransitionRow,
    NotConverged,
)

from conftest import DN, UP, coupled_markov_spec, kelly_spec, two_cycle_spec


# ---------------------------------------------------------------------------
# builders


def test_build_iid_single_atom_constant_market():
    spec = gl.build_iid([((1.0, 1.0), ())], [1.0])
    assert spec.n_atoms == 1
    path = gl.sample_path(spec, 5, 0)
    assert list(path.atom_ids) == [0] * 5


def test_build_iid_kelly_coin_flip():
    spec = kelly_spec()
    assert spec.m == 2 and spec.k == 0
    assert np.allclose(spec.marginal, [0.5, 0.5])
    np.testing.assert_array_equal(spec.x_matrix, np.array([UP, DN]))


def test_build_iid_rejects_unnormalized_probs():
    with pytest.raises(InvalidProbability):
        gl.build_iid([(UP, ()), (DN, ())], [0.6, 0.6])


def test_build_iid_rejects_nonpositive_returns():
    with pytest.raises(gl.NonPositiveInput):
        gl.build_iid([((2.0, 0.0), ())], [1.0])


def test_build_iid_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        gl.build_iid([(UP, ()), (DN, ())], [1.0])


def test_build_markov_stationarity_flag_true():
    spec = gl.build_markov(
        [(UP, ()), (DN, ())], 1, [[0.9, 0.1], [0.5, 0.5]], (5 / 6, 1 / 6)
    )
    # pi P = pi solved by hand: pi = (5/6, 1/6)
    assert spec.stationary_start


def test_build_markov_nonstationary_start_flagged():
    spec = gl.build_markov(
        [(UP, ()), (DN, ())], 1, [[0.9, 0.1], [0.5, 0.5]], (0.5, 0.5)
    )
    assert not spec.stationary_start


def test_build_markov_reducible_with_explicit_start_is_valid():
    spec = gl.build_markov([(UP, ()), (DN, ())], 1, [[1.0, 0.0], [0.0, 1.0]], (1.0, 0.0))
    assert not spec.stationary_start
    path = gl.sample_path(spec, 6, 3)
    assert list(path.atom_ids) == [0] * 6


def test_build_markov_invalid_row():
    with pytest.raises(InvalidProbability):
        gl.build_markov([(UP, ()), (DN, ())], 1, [[0.9, 0.2], [0.5, 0.5]])


def test_build_markov_missing_row():
    # state (1,) is reachable from (0,) but has no transition row
    with pytest.raises(MissingTransitionRow):
        gl.build_markov([(UP, ()), (DN, ())], 1, {(0,): [0.5, 0.5]})


def test_build_markov_rejects_order_zero():
    with pytest.raises(DimensionMismatch):
        gl.build_markov([(UP, ()), (DN, ())], 0, [[1.0]])


def test_build_mixture_degenerate_weight_pins_mode():
    a = gl.build_iid([(UP, ()), (DN, ())], [0.6, 0.4])
    b = gl.build_iid([(UP, ()), (DN, ())], [0.4, 0.6])
    mix = gl.build_mixture([a, b], [1.0, 0.0])
    for seed in range(20):
        assert gl.sample_path(mix, 3, seed).mode_id == 0


def test_build_mixture_mode_frequency():
    a = gl.build_iid([(UP, ()), (DN, ())], [0.6, 0.4])
    b = gl.build_iid([(UP, ()), (DN, ())], [0.4, 0.6])
    mix = gl.build_mixture([a, b], [0.5, 0.5])
    draws = 10_000
    modes = np.array([gl.sample_path(mix, 1, seed).mode_id for seed in range(draws)])
    frac = (modes == 0).mean()
    assert abs(frac - 0.5) <= 3 * np.sqrt(0.25 / draws)  # binomial 3-sigma


def test_build_mixture_dimension_mismatch():
    a = gl.build_iid([(UP, ()), (DN, ())], [0.5, 0.5])
    b = gl.build_iid([((2.0, 1.0, 1.0), ())], [1.0])
    with pytest.raises(DimensionMismatch):
        gl.build_mixture([a, b], [0.5, 0.5])


# ---------------------------------------------------------------------------
# stationary distribution


def test_stationary_symmetric_two_state():
    spec = gl.build_markov([(UP, ()), (DN, ())], 1, [[0.5, 0.5], [0.5, 0.5]])
    np.testing.assert_allclose(gl.stationary_distribution(spec), [0.5, 0.5], atol=1e-12)


def test_stationary_asymmetric_two_state():
    spec = gl.build_markov([(UP, ()), (DN, ())], 1, [[0.9, 0.1], [0.5, 0.5]])
    pi = gl.stationary_distribution(spec)
    # linear solve of pi P = pi: pi = (5/6, 1/6)
    np.testing.assert_allclose(pi, [5 / 6, 1 / 6], atol=1e-10)
    rows = np.array([[0.9, 0.1], [0.5, 0.5]])
    assert np.abs(pi @ rows - pi).sum() <= 1e-10


def test_stationary_identity_chain_not_converged():
    with pytest.raises(NotConverged):
        gl.build_markov([(UP, ()), (DN, ())], 1, [[1.0, 0.0], [0.0, 1.0]])


# ---------------------------------------------------------------------------
# sampling


def test_two_cycle_path_from_atom_zero():
    spec = gl.build_markov([(UP, ()), (DN, ())], 1, [[0.0, 1.0], [1.0, 0.0]], (1.0, 0.0))
    path = gl.sample_path(spec, 4, 11)
    # hand simulation: latent start atom 0, deterministic swaps
    assert list(path.atom_ids) == [1, 0, 1, 0]


def test_two_cycle_stationary_is_uniform():
    spec = two_cycle_spec()
    np.testing.assert_allclose(gl.stationary_distribution(spec), [0.5, 0.5], atol=1e-12)


def test_sample_path_reproducible(kelly):
    a = gl.sample_path(kelly, 1000, 42)
    b = gl.sample_path(kelly, 1000, 42)
    assert a.atom_ids.tobytes() == b.atom_ids.tobytes()
    assert a.digest == b.digest


def test_sample_path_rejects_empty(kelly):
    with pytest.raises(DimensionMismatch):
        gl.sample_path(kelly, 0, 1)


def test_markov_empirical_frequencies_match_stationary(coupled_spec):
    path = gl.sample_path(coupled_spec, 100_000, 1)
    pi = gl.stationary_distribution(coupled_spec)
    freq = np.bincount(path.atom_ids, minlength=4) / path.n
    bound = 3 * np.sqrt(pi * (1 - pi) / path.n)
    assert np.all(np.abs(freq - pi) <= bound)


def test_mixture_path_uses_component_atoms(mixture_spec):
    path = gl.sample_path(mixture_spec, 50, 7)
    assert path.component_spec is mixture_spec.components[path.mode_id]
    assert path.x_matrix.shape == (50, 2)


# ---------------------------------------------------------------------------
# conditionals


def test_conditional_iid_ignores_history(kelly):
    np.testing.assert_array_equal(gl.conditional_next(kelly, []), kelly.marginal)
    np.testing.assert_array_equal(gl.conditional_next(kelly, [1, 0, 1]), kelly.marginal)


def test_conditional_markov_row_lookup():
    spec = gl.build_markov([(UP, ()), (DN, ())], 1, [[0.9, 0.1], [0.5, 0.5]])
    np.testing.assert_array_equal(gl.conditional_next(spec, [0, 1]), [0.5, 0.5])
    np.testing.assert_array_equal(gl.conditional_next(spec, [1, 0]), [0.9, 0.1])


def test_conditional_history_too_short():
    spec = gl.build_markov([(UP, ()), (DN, ())], 1, [[0.9, 0.1], [0.5, 0.5]])
    with pytest.raises(HistoryTooShort):
        gl.conditional_next(spec, [])


def test_conditional_partial_filters_latent_prefix():
    spec = gl.build_markov([(UP, ()), (DN, ())], 1, [[0.9, 0.1], [0.5, 0.5]])
    pi = gl.stationary_distribution(spec)
    rows = np.array([[0.9, 0.1], [0.5, 0.5]])
    np.testing.assert_allclose(
        gl.conditional_next(spec, [], allow_partial=True), pi @ rows, atol=1e-12
    )


def test_conditional_partial_order_two_exact():
    # order-2 chain: next atom depends on the pair of previous atoms
    trans = {
        (0, 0): [0.9, 0.1], (0, 1): [0.3, 0.7],
        (1, 0): [0.6, 0.4], (1, 1): [0.2, 0.8],
    }
    spec = gl.build_markov([(UP, ()), (DN, ())], 2, trans)
    pi = gl.stationary_distribution(spec)
    states = spec.markov_states
    # P(a2 | a1=0) by hand: filter over the latent first element of the tuple
    w = np.array([pi[i] * trans[s][0] for i, s in enumerate(states)])
    nxt = {s: states.index((s[1], 0)) for s in states}
    cond = np.zeros(2)
    for i, s in enumerate(states):
        cond += w[i] * np.asarray(trans[states[nxt[s]]])
    cond /= w.sum()
    np.testing.assert_allclose(
        gl.conditional_next(spec, [0], allow_partial=True), cond, atol=1e-12
    )


def test_conditional_rows_sum_to_one(coupled_spec):
    for hist in ([], [0], [1, 2], [3, 0, 1]):
        row = gl.conditional_next(coupled_spec, hist, allow_partial=True)
        assert abs(row.sum() - 1.0) <= 1e-12
        assert np.all(row >= 0.0)


def test_conditional_mixture_delegates_to_mode(mixture_spec):
    for mode in (0, 1):
        np.testing.assert_array_equal(
            gl.conditional_next(mixture_spec, [0, 1], mode),
            gl.conditional_next(mixture_spec.components[mode], [0, 1]),
        )


# ---------------------------------------------------------------------------
# serialization


def test_spec_json_round_trip(coupled_spec):
    doc = gl.spec_to_json(coupled_spec)
    clone = gl.spec_from_json(json.loads(json.dumps(doc)))
    assert clone.digest == coupled_spec.digest
    np.testing.assert_array_equal(clone.x_matrix, coupled_spec.x_matrix)
    np.testing.assert_array_equal(clone.y_matrix, coupled_spec.y_matrix)


def test_mixture_json_round_trip(mixture_spec):
    clone = gl.spec_from_json(gl.spec_to_json(mixture_spec))
    assert clone.digest == mixture_spec.digest


def test_digest_distinguishes_specs(kelly):
    other = gl.build_iid([(UP, ()), (DN, ())], [0.6, 0.4])
    assert kelly.digest != other.digest
    assert kelly.digest == kelly_spec().digest  # content-addressed


def test_atom_index_exact_lookup(kelly):
    assert kelly.atom_index(np.array(UP), ()) == 0
    assert kelly.atom_index(np.array(DN), ()) == 1
    with pytest.raises(gl.GrowthLabError):
        kelly.atom_index(np.array([3.0, 1.0]), ())
