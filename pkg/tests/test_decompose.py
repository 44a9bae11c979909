import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symtd import (
    FactorDecomposition,
    InstanceSpec,
    OstdOptions,
    ScoreOptions,
    WhitenOptions,
    WhiteningFailure,
    from_factors,
    gen_instance,
    ostd,
    random_coefficients,
    relative_error,
    solution_score,
    whitened_ostd,
)
from symtd.errors import ShapeMismatch
from symtd.linalg import random_orthogonal
from symtd.tensor import outer_power, symmetrize


def opts(seed=0, **kw):
    return OstdOptions(rng=np.random.default_rng(seed), **kw)


def wopts(seed=0, randomize=False, **kw):
    return WhitenOptions(base=opts(seed, randomize=randomize), **kw)


# -- coefficients ---------------------------------------------------------------

def test_coefficients_single_entry(rng):
    np.testing.assert_array_equal(random_coefficients(1, 1, rng), [1.0])


@pytest.mark.parametrize("order, dim", [(1, 4), (2, 3), (4, 6)])
def test_coefficients_sum_to_one(rng, order, dim):
    c = random_coefficients(order, dim, rng)
    assert c.shape == (dim,) * order
    assert abs(c.sum() - 1) < 1e-14
    assert np.all(c >= 0)


def test_coefficients_mean(rng):
    draws = np.stack([random_coefficients(2, 3, rng) for _ in range(100_000)])
    np.testing.assert_allclose(draws.mean(axis=0), 1 / 9, rtol=0.01)


def test_options_validate():
    with pytest.raises(ValueError):
        OstdOptions(nonzero_tol=0)
    with pytest.raises(ValueError):
        WhitenOptions(max_psd_attempts=0)


# -- orthogonal decomposition ---------------------------------------------------------

def test_ostd_axis_factors():
    a = from_factors(FactorDecomposition([5.0, 2.0], np.eye(3)[:, :2]), 3)
    d = ostd(a, opts())
    assert d.rank == 2
    np.testing.assert_allclose(sorted(d.weights), [2, 5], atol=1e-12)
    np.testing.assert_allclose(np.abs(d.factors.T @ np.eye(3)[:, :2]).max(axis=0), 1, atol=1e-12)
    assert relative_error(a, d) < 1e-12


def test_ostd_zero_tensor():
    d = ostd(symmetrize(3, 4, np.zeros(64)), opts())
    assert d.rank == 0
    assert d.factors.shape == (4, 0)


def test_ostd_rejects_matrix():
    with pytest.raises(ShapeMismatch):
        ostd(outer_power([1.0, 2.0], 2))


def test_ostd_orders_by_sigma_magnitude():
    a = from_factors(FactorDecomposition([1.0, 2.0, 3.0], np.eye(3)), 3)
    d = ostd(a, opts(), coefficients=np.ones(3) / 3)
    np.testing.assert_allclose(d.weights, [3, 2, 1], atol=1e-12)


@pytest.mark.parametrize("m, n, p", [(3, 4, 2), (4, 25, 3), (6, 6, 4)])
@pytest.mark.parametrize("randomize", [False, True])
def test_ostd_random_orthogonal_instances(m, n, p, randomize):
    for seed in range(5):
        gt = gen_instance(InstanceSpec(m=m, n=n, p=p, seed=seed))
        d = ostd(gt.observed, opts(seed, randomize=randomize))
        assert d.rank == p
        assert relative_error(gt.observed, d) <= 1e-10
        assert solution_score(d, gt.truth, ScoreOptions(m=m)) == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(d.factors.T @ d.factors, np.eye(p), atol=1e-10)


def test_ostd_single_slice_demo():
    a = gen_instance(InstanceSpec(m=3, n=3, family="identity", weights=(3.0, 2.0, 1.0))).observed
    e1 = np.array([1.0, 0.0, 0.0])
    assert ostd(a, opts(), coefficients=e1).rank == 1
    assert ostd(a, opts()).rank == 3
    assert ostd(a, opts(randomize=True), coefficients=e1).rank == 3


def test_ostd_is_deterministic_per_seed():
    a = gen_instance(InstanceSpec(m=4, n=5, p=3, seed=3)).observed
    d1, d2 = ostd(a, opts(11, randomize=True)), ostd(a, opts(11, randomize=True))
    np.testing.assert_array_equal(d1.factors, d2.factors)
    np.testing.assert_array_equal(d1.weights, d2.weights)


def test_ostd_non_orthogonal_input_has_residual():
    gt = gen_instance(InstanceSpec(m=3, n=4, p=2, family="nonorthogonal", seed=1))
    d = ostd(gt.observed, opts())
    assert relative_error(gt.observed, d) > 1e-3


weights = st.floats(min_value=0.1, max_value=10) | st.floats(min_value=-10, max_value=-0.1)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(min_value=3, max_value=5),
    st.integers(min_value=1, max_value=5),
    st.data(),
    st.integers(min_value=0, max_value=2**32 - 1),
    st.booleans(),
)
def test_ostd_round_trip(m, n, data, seed, randomize):
    p = data.draw(st.integers(min_value=1, max_value=n))
    lam = np.array(data.draw(st.lists(weights, min_size=p, max_size=p)))
    rng = np.random.default_rng(seed)
    x = random_orthogonal(n, rng)[:, :p]
    truth = FactorDecomposition(lam, x)
    a = from_factors(truth, m)
    d = ostd(a, OstdOptions(randomize=randomize, rng=rng))
    assert d.rank == p
    assert relative_error(a, d) <= 1e-10
    assert solution_score(d, truth, ScoreOptions(m=m)) >= 1 - 1e-10


# -- whitening ----------------------------------------------------------------

def whitening_identity_ok(report):
    w, c = report.whitening, report.psd_matrix
    np.testing.assert_allclose(w @ c @ w.T, np.eye(report.whitened_dim), atol=1e-10)


@pytest.mark.parametrize("extended", [True, False])
def test_whiten_nie(extended):
    gt = gen_instance(InstanceSpec(family="nie"))
    report = whitened_ostd(gt.observed, wopts(0, extended_precision=extended))
    d = report.decomposition
    assert d.rank == 2
    assert report.whitened_dim == 2
    assert 1 <= report.psd_attempts <= 100
    np.testing.assert_allclose(sorted(d.weights), [196, 676], rtol=1e-10)
    assert solution_score(d, gt.truth, ScoreOptions(m=4)) == pytest.approx(1.0, abs=1e-10)
    whitening_identity_ok(report)


def test_whiten_matches_ostd_on_orthogonal_input():
    gt = gen_instance(InstanceSpec(m=4, n=5, p=3, seed=4))
    d1 = ostd(gt.observed, opts(1))
    d2 = whitened_ostd(gt.observed, wopts(2)).decomposition
    assert d2.rank == d1.rank == 3
    score = solution_score(d2, d1, ScoreOptions(m=4))
    assert score == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("m, n, p", [(4, 25, 3), (6, 6, 4)])
def test_whiten_even_order_nonorthogonal(m, n, p):
    for seed in range(5):
        gt = gen_instance(InstanceSpec(m=m, n=n, p=p, family="nonorthogonal", seed=seed))
        report = whitened_ostd(gt.observed, wopts(seed))
        assert report.decomposition.rank == p
        assert relative_error(gt.observed, report.decomposition) <= 1e-8
        assert solution_score(report.decomposition, gt.truth, ScoreOptions(m=m)) >= 0.99
        whitening_identity_ok(report)


def test_whiten_randomized_nie():
    gt = gen_instance(InstanceSpec(family="nie"))
    d = whitened_ostd(gt.observed, wopts(5, randomize=True)).decomposition
    assert relative_error(gt.observed, d) < 1e-10
    assert solution_score(d, gt.truth, ScoreOptions(m=4)) == pytest.approx(1.0, abs=1e-10)


def test_whiten_unit_norm_columns():
    gt = gen_instance(InstanceSpec(m=4, n=6, p=3, family="nonorthogonal", seed=9))
    d = whitened_ostd(gt.observed, wopts()).decomposition
    np.testing.assert_allclose(np.linalg.norm(d.factors, axis=0), 1, atol=1e-12)


def test_whiten_failure_when_no_psd_combination():
    # x1 = e1, x2 = -e1-ish: every nonnegative gamma gives sigma of opposite sign
    x = np.array([[1.0, -0.6], [0.0, -0.8]])
    a = from_factors(FactorDecomposition([1.0, 1.0], x), 3)
    with pytest.raises(WhiteningFailure) as info:
        whitened_ostd(a, wopts(max_psd_attempts=7))
    assert info.value.attempts == 7


def test_whiten_zero_tensor():
    report = whitened_ostd(symmetrize(4, 3, np.zeros(81)), wopts())
    assert report.decomposition.rank == 0
    assert report.whitened_dim == 0
