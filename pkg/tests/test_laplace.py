import math
import pickle

import numpy as np
import pytest

from nlp_select.data import Dataset
from nlp_select.errors import InvalidInputError
from nlp_select.laplace import (
    MarginalCache,
    find_mode,
    log_marginal,
    log_posterior_ratio,
    ridge_start,
)
from nlp_select.oracle import golden_section_max
from nlp_select.prior import HyperPmomConfig, grad_f, hessian_V, log_objective_f
from nlp_select.simulate import SimDesign, generate

from conftest import toy_dataset


def cfg_for(data, lambda2=5.0, m_n=None):
    return HyperPmomConfig(r=1, lambda1=1.0, lambda2=lambda2, m_n=m_n or data.p)


def test_find_mode_rejects_empty_and_zero_init(small_data):
    cfg = cfg_for(small_data)
    with pytest.raises(InvalidInputError):
        find_mode(small_data, cfg, ())
    with pytest.raises(InvalidInputError):
        find_mode(small_data, cfg, (0,), init=[0.0])


def test_one_dimensional_mode_matches_golden_section():
    data = toy_dataset(n=60, p=3, seed=13, beta=[2.0], support=(0,))
    cfg = cfg_for(data, lambda2=10.0)
    k = (0,)
    beta_hat, diag = find_mode(data, cfg, k)
    assert diag.converged
    golden = golden_section_max(
        lambda b: log_objective_f(data, cfg, k, [b]), 1e-6, 20.0, tol=1e-10
    )
    assert beta_hat[0] == pytest.approx(golden, abs=1e-6)


def test_mode_is_local_maximum(signal_data):
    train, _, (supp, _) = signal_data
    cfg = cfg_for(train, lambda2=8.0)
    k = supp
    beta_hat, diag = find_mode(train, cfg, k)
    assert diag.converged
    f_hat = log_objective_f(train, cfg, k, beta_hat)
    rng = np.random.default_rng(0)
    for _ in range(100):
        delta = rng.standard_normal(len(k))
        delta *= 1e-3 / np.linalg.norm(delta)
        cand = beta_hat + delta
        if np.any(np.sign(cand) != np.sign(beta_hat)):
            continue
        assert f_hat >= log_objective_f(train, cfg, k, cand) - 1e-12


def test_gradient_small_at_mode(signal_data):
    train, _, (supp, _) = signal_data
    cfg = cfg_for(train, lambda2=8.0)
    beta_hat, diag = find_mode(train, cfg, supp)
    f_hat = log_objective_f(train, cfg, supp, beta_hat)
    g = grad_f(train, cfg, supp, beta_hat)
    assert np.max(np.abs(g)) < 1e-6 * (1.0 + abs(f_hat))
    assert diag.grad_inf_norm == pytest.approx(np.max(np.abs(g)), rel=1e-6)


def test_mode_nonzero_and_curvature_negative_definite(signal_data):
    train, _, (supp, _) = signal_data
    cfg = cfg_for(train, lambda2=8.0)
    beta_hat, _ = find_mode(train, cfg, supp)
    assert np.all(np.abs(beta_hat) > 1e-6)
    V = hessian_V(train, cfg, supp, beta_hat)
    assert np.all(np.linalg.eigvalsh(V) < 0.0)


def test_empty_model_marginal_exact():
    data = toy_dataset(n=100, p=3, seed=1)
    cfg = cfg_for(data)
    sm = log_marginal(data, cfg, ())
    assert sm.log_laplace_marginal == pytest.approx(-100 * math.log(2), abs=1e-12)
    assert sm.converged and sm.iterations == 0


def test_marginal_formula_consistency(signal_data):
    train, _, (supp, _) = signal_data
    cfg = cfg_for(train, lambda2=8.0)
    sm = log_marginal(train, cfg, supp)
    V = hessian_V(train, cfg, supp, sm.beta_hat)
    want = (
        0.5 * len(supp) * math.log(2 * math.pi)
        + sm.log_f_at_mode
        - 0.5 * math.log(np.linalg.det(-V))
    )
    assert sm.log_laplace_marginal == pytest.approx(want, abs=1e-8)


def test_size_cap_precondition(small_data):
    cfg = cfg_for(small_data, m_n=1)
    with pytest.raises(InvalidInputError):
        log_marginal(small_data, cfg, (0, 1))


def test_posterior_ratio_antisymmetry(signal_data):
    train, _, (supp, _) = signal_data
    cfg = cfg_for(train, lambda2=8.0)
    a = log_marginal(train, cfg, supp)
    b = log_marginal(train, cfg, (0,))
    assert log_posterior_ratio(a, a, cfg) == 0.0
    assert log_posterior_ratio(a, b, cfg) == pytest.approx(
        -log_posterior_ratio(b, a, cfg), abs=1e-12
    )


def test_bit_identical_rescoring(signal_data):
    train, _, (supp, _) = signal_data
    cfg = cfg_for(train, lambda2=8.0)
    a = log_marginal(train, cfg, supp)
    b = log_marginal(train, cfg, supp)
    assert a.log_laplace_marginal == b.log_laplace_marginal
    assert a.log_f_at_mode == b.log_f_at_mode
    assert np.array_equal(a.beta_hat, b.beta_hat)
    assert pickle.dumps(a) == pickle.dumps(b)


def test_orthant_symmetry_under_column_flip():
    train, _, (supp, _) = generate(SimDesign(n=80, p=6, signal=2.0, seed=9))
    cfg = cfg_for(train, lambda2=8.0)
    k = supp
    sm = log_marginal(train, cfg, k)
    X_flipped = train.X.copy()
    X_flipped[:, k[0]] *= -1.0
    flipped = Dataset(X=X_flipped, y=train.y)
    sm_f = log_marginal(flipped, cfg, k)
    assert sm_f.log_laplace_marginal == pytest.approx(
        sm.log_laplace_marginal, abs=1e-8
    )
    assert sm_f.beta_hat[0] == pytest.approx(-sm.beta_hat[0], abs=1e-6)


def test_ridge_start_avoids_hyperplanes(small_data):
    start = ridge_start(small_data, (0, 1, 2))
    assert np.all(np.abs(start) >= 0.05 - 1e-12)


def test_cache_counts_and_coherence(signal_data):
    train, _, (supp, _) = signal_data
    cfg = cfg_for(train, lambda2=8.0)
    cache = MarginalCache(train, cfg)
    a = cache.score(supp)
    b = cache.score(supp)
    assert cache.misses == 1 and cache.hits == 1
    assert a.log_laplace_marginal == b.log_laplace_marginal
    cache.score((0,))
    assert cache.misses == 2 and len(cache) == 2


def test_ridge_start_converges_fast_on_moderate_signal_instances():
    # models up to size 5 on moderate-signal data converge well under the cap
    for seed in range(5):
        train, _, _ = generate(SimDesign(n=100, p=100, signal=2.0, seed=seed))
        cfg = HyperPmomConfig(r=1, lambda1=1.0, lambda2=400.0, m_n=10)
        for k in [(0,), (0, 1, 2), (0, 1, 2, 7, 40)]:
            _, diag = find_mode(train, cfg, k)
            assert diag.converged
            assert diag.iterations < 200


def test_iteration_cap_reported_not_raised(signal_data):
    train, _, (supp, _) = signal_data
    cfg = cfg_for(train, lambda2=8.0)
    sm = log_marginal(train, cfg, supp, max_iterations=1)
    assert not sm.converged
    assert sm.iterations == 1
    assert math.isfinite(sm.log_laplace_marginal)
