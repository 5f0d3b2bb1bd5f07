import math

import numpy as np
import pytest

from nlp_select.errors import InvalidInputError
from nlp_select.laplace import log_marginal
from nlp_select.oracle import (
    exhaustive_mode,
    finite_diff_gradient,
    golden_section_max,
    hierarchical_marginal_1d,
    quadrature_marginal,
)
from nlp_select.prior import HyperPmomConfig
from nlp_select.simulate import SimDesign, generate

from conftest import toy_dataset


def test_finite_diff_gradient_on_polynomial():
    fn = lambda x: x[0] ** 3 + 2.0 * x[0] * x[1]
    g = finite_diff_gradient(fn, np.array([1.5, -2.0]))
    assert g == pytest.approx([3 * 1.5**2 - 4.0, 3.0], rel=1e-7)


def test_golden_section_on_parabola():
    assert golden_section_max(lambda x: -((x - 1.7) ** 2), 0.0, 5.0) == pytest.approx(
        1.7, abs=1e-7
    )


def test_quadrature_empty_model_exact():
    data = toy_dataset(n=50, p=3, seed=0)
    cfg = HyperPmomConfig(r=1, lambda1=1.0, lambda2=2.0, m_n=3)
    assert quadrature_marginal(data, cfg, ()) == pytest.approx(
        -50 * math.log(2), abs=1e-12
    )


def test_quadrature_refinement_stability():
    data = toy_dataset(n=40, p=3, seed=5, beta=[1.5], support=(0,))
    cfg = HyperPmomConfig(r=1, lambda1=1.0, lambda2=2.0, m_n=3)
    coarse = quadrature_marginal(data, cfg, (0,), rtol=1e-4, start_nodes=16)
    fine = quadrature_marginal(data, cfg, (0,), rtol=1e-8, start_nodes=64)
    assert coarse == pytest.approx(fine, abs=1e-4)


def test_quadrature_rejects_large_models():
    data = toy_dataset(n=30, p=4, seed=2)
    cfg = HyperPmomConfig(r=1, lambda1=1.0, lambda2=2.0, m_n=4)
    with pytest.raises(InvalidInputError):
        quadrature_marginal(data, cfg, (0, 1, 2))


def test_hierarchical_equals_closed_form_marginalization():
    # the 2-d (coefficient, scale) integral must equal the 1-d integral of
    # the closed-form scale-marginalized objective
    data = toy_dataset(n=25, p=2, seed=7, beta=[1.2], support=(0,))
    for lambda1, lambda2, r in [(1.0, 2.0, 1), (1.5, 0.8, 1), (0.7, 5.0, 2)]:
        cfg = HyperPmomConfig(r=r, lambda1=lambda1, lambda2=lambda2, m_n=2)
        closed = quadrature_marginal(data, cfg, (0,), rtol=1e-8)
        hier = hierarchical_marginal_1d(data, cfg, (0,), rtol=1e-8)
        assert abs(math.exp(hier - closed) - 1.0) < 1e-6


def test_laplace_within_half_nat_on_signal_models():
    train, _, (supp, _) = generate(
        SimDesign(n=100, p=4, signal=2.0, true_support=(0, 1), seed=3)
    )
    cfg = HyperPmomConfig(r=1, lambda1=1.0, lambda2=10.0, m_n=4)
    for k in [(0,), (0, 1)]:
        lap = log_marginal(train, cfg, k).log_laplace_marginal
        quad = quadrature_marginal(train, cfg, k)
        assert abs(lap - quad) < 0.5


def test_exhaustive_mode_small_strong_signal():
    cfg = HyperPmomConfig(r=1, lambda1=1.0, lambda2=3.0, m_n=3)
    hits = 0
    for seed in range(10):
        train, _, (supp, _) = generate(
            SimDesign(n=120, p=3, signal=3.0, true_support=(0,), seed=seed)
        )
        best = exhaustive_mode(train, cfg)
        hits += best.k == (0,)
    assert hits == 10


def test_exhaustive_mode_dominates_every_model():
    train, _, _ = generate(SimDesign(n=60, p=5, signal=2.0, seed=11))
    cfg = HyperPmomConfig(r=1, lambda1=1.0, lambda2=5.0, m_n=3)
    best = exhaustive_mode(train, cfg)
    import itertools

    for size in range(4):
        for combo in itertools.combinations(range(5), size):
            sm = log_marginal(train, cfg, combo)
            assert best.log_laplace_marginal >= sm.log_laplace_marginal - 1e-12


def test_exhaustive_mode_refuses_large_p():
    rng = np.random.default_rng(0)
    from nlp_select.data import Dataset

    data = Dataset(X=rng.standard_normal((20, 16)), y=rng.integers(0, 2, 20).astype(float))
    cfg = HyperPmomConfig(r=1, lambda1=1.0, lambda2=2.0, m_n=3)
    with pytest.raises(InvalidInputError):
        exhaustive_mode(data, cfg)
