import numpy as np
import pytest

from nlp_select.errors import InvalidInputError
from nlp_select.simulate import MODERATE, WEAK, SimDesign, ar1_cholesky, generate


def test_signal_levels():
    assert WEAK == 1.0 and MODERATE == 2.0


def test_design_validation():
    with pytest.raises(InvalidInputError):
        SimDesign(n=1)
    with pytest.raises(InvalidInputError):
        SimDesign(signal=0.0)
    with pytest.raises(InvalidInputError):
        SimDesign(covariance="toeplitz")
    with pytest.raises(InvalidInputError):
        SimDesign(p=5, true_support=(0, 7))


def test_shapes_and_standardization():
    train, test, (supp, beta0) = generate(SimDesign(n=80, p=12, n_test=30, seed=4))
    assert train.X.shape == (80, 12) and test.X.shape == (30, 12)
    assert supp == (0, 1, 2)
    assert np.all(beta0 == 2.0)
    assert np.all(np.abs(train.X.mean(axis=0)) < 1e-10)
    assert np.all(np.abs(train.X.std(axis=0, ddof=1) - 1.0) < 1e-10)
    # test columns share the train transform, not their own
    assert np.array_equal(test.column_means, train.column_means)
    assert np.array_equal(test.column_sds, train.column_sds)


def test_seed_determinism():
    d = SimDesign(n=50, p=8, seed=123)
    a_train, a_test, a_truth = generate(d)
    b_train, b_test, b_truth = generate(d)
    assert np.array_equal(a_train.X, b_train.X)
    assert np.array_equal(a_train.y, b_train.y)
    assert np.array_equal(a_test.X, b_test.X)
    assert np.array_equal(a_test.y, b_test.y)
    assert a_truth[0] == b_truth[0]
    assert np.array_equal(a_truth[1], b_truth[1])
    c_train, _, _ = generate(SimDesign(n=50, p=8, seed=124))
    assert not np.array_equal(a_train.X, c_train.X)


def test_isotropic_sample_covariance():
    train, _, _ = generate(SimDesign(n=100_000, p=3, seed=0))
    raw = train.X * train.column_sds + train.column_means
    cov = np.cov(raw.T)
    assert np.max(np.abs(cov - np.eye(3))) < 0.03


def test_ar1_sample_correlations():
    train, _, _ = generate(SimDesign(n=100_000, p=3, covariance="ar1", seed=1))
    raw = train.X * train.column_sds + train.column_means
    corr = np.corrcoef(raw.T)
    assert corr[0, 1] == pytest.approx(0.3, abs=0.03)
    assert corr[0, 2] == pytest.approx(0.09, abs=0.03)


def test_ar1_cholesky_reconstructs_covariance():
    L = ar1_cholesky(6, 0.3)
    idx = np.arange(6)
    want = 0.3 ** np.abs(idx[:, None] - idx[None, :])
    assert np.allclose(L @ L.T, want, atol=1e-12)


def test_null_signal_gives_fair_coin():
    # empty support: the linear predictor is identically zero
    train, _, (supp, beta0) = generate(
        SimDesign(n=100_000, p=2, true_support=(), seed=2)
    )
    assert supp == () and beta0.shape == (0,)
    assert train.y.mean() == pytest.approx(0.5, abs=0.01)


def test_response_depends_on_design_only_through_support():
    # white-box: replay the documented draw order (train X, train uniforms)
    # and regenerate y from the recovered raw linear predictor
    d = SimDesign(n=200, p=7, signal=1.5, true_support=(1, 4), seed=77)
    train, _, (supp, beta0) = generate(d)
    raw = train.X * train.column_sds + train.column_means
    eta = raw[:, list(supp)] @ beta0
    rng = np.random.default_rng(77)
    rng.standard_normal((200, 7))  # skip the X block
    u = rng.random(200)
    regenerated = (u < 1.0 / (1.0 + np.exp(-eta))).astype(float)
    assert np.array_equal(regenerated, train.y)
