import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlp_select.errors import InvalidInputError
from nlp_select.laplace import ScoredModel, log_marginal
from nlp_select.metrics import (
    aggregate_reports,
    confusion,
    mcc,
    mspe,
    predict,
    roc_points,
    selection_report,
    support_from_coefficients,
)
from nlp_select.prior import HyperPmomConfig
from nlp_select.simulate import SimDesign, generate


def test_confusion_examples():
    assert confusion((0, 1, 2), (0, 1, 2), 100) == (3, 97, 0, 0)
    assert confusion((), (0, 1, 2), 100) == (0, 97, 0, 3)
    assert confusion((4, 5), (5, 6), 10) == (1, 7, 1, 1)


@given(
    st.integers(1, 60),
    st.sets(st.integers(0, 59), max_size=8),
    st.sets(st.integers(0, 59), max_size=8),
)
@settings(max_examples=60)
def test_confusion_matches_set_arithmetic(p, sel, tru):
    p = max(p, max(sel | tru) + 1 if sel | tru else 1)
    sel_t, tru_t = tuple(sorted(sel)), tuple(sorted(tru))
    tp, tn, fp, fn = confusion(sel_t, tru_t, p)
    assert tp == len(sel & tru)
    assert fp == len(sel - tru)
    assert fn == len(tru - sel)
    assert tp + tn + fp + fn == p


def test_mcc_values():
    assert mcc(3, 97, 0, 0) == 1.0
    assert mcc(0, 97, 0, 3) == 0.0  # zero-denominator convention
    # hand evaluation: (2*96 - 1*1) / sqrt(3 * 3 * 97 * 97) = 191 / 291
    assert mcc(2, 96, 1, 1) == pytest.approx(191 / 291, abs=1e-12)


@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
@settings(max_examples=100)
def test_mcc_range_and_swap_symmetry(tp, tn, fp, fn):
    v = mcc(tp, tn, fp, fn)
    assert -1.0 <= v <= 1.0
    assert v == pytest.approx(mcc(tn, tp, fn, fp), abs=1e-12)


def test_selection_report_ratios_and_missing_precision():
    rep = selection_report((), (0, 1, 2), 100)
    assert rep.precision is None
    assert rep.sensitivity == 0.0
    assert rep.specificity == 1.0
    assert rep.mcc == 0.0
    rep2 = selection_report((0, 1), (0, 1, 2), 100, mspe=0.1)
    assert rep2.precision == 1.0
    assert rep2.sensitivity == pytest.approx(2 / 3)
    assert rep2.mspe == 0.1


def test_empty_model_predicts_half():
    _, test, _ = generate(SimDesign(n=40, p=4, seed=1))
    sm = ScoredModel(
        k=(), beta_hat=np.zeros(0), log_f_at_mode=0.0,
        log_laplace_marginal=0.0, converged=True, iterations=0,
    )
    assert np.all(predict(test, sm) == 0.5)


def test_predict_hand_fixture():
    from nlp_select.data import Dataset

    X = np.array([[1.0, 0.0], [0.0, 2.0], [-1.0, 1.0]])
    test = Dataset(X=X, y=np.array([1.0, 0.0, 1.0]))
    sm = ScoredModel(
        k=(0, 1), beta_hat=np.array([0.5, -1.0]), log_f_at_mode=0.0,
        log_laplace_marginal=0.0, converged=True, iterations=0,
    )
    z = X @ np.array([0.5, -1.0])
    want = 1.0 / (1.0 + np.exp(-z))
    assert np.allclose(predict(test, sm), want, atol=1e-12)


def test_predict_sign_flip_symmetry():
    train, test, (supp, _) = generate(SimDesign(n=60, p=5, signal=2.0, seed=5))
    cfg = HyperPmomConfig(r=1, lambda1=1.0, lambda2=5.0, m_n=5)
    sm = log_marginal(train, cfg, supp)
    base = predict(test, sm)
    from nlp_select.data import Dataset

    X_f = test.X.copy()
    X_f[:, supp[0]] *= -1.0
    flipped_test = Dataset(X=X_f, y=test.y)
    beta_f = sm.beta_hat.copy()
    beta_f[0] *= -1.0
    sm_f = ScoredModel(
        k=sm.k, beta_hat=beta_f, log_f_at_mode=sm.log_f_at_mode,
        log_laplace_marginal=sm.log_laplace_marginal,
        converged=sm.converged, iterations=sm.iterations,
    )
    assert np.allclose(predict(flipped_test, sm_f), base, atol=1e-12)


def test_mspe_examples():
    assert mspe([1, 0, 1], [1.0, 0.0, 1.0]) == 0.0
    assert mspe([0, 1, 0, 1], [0.5, 0.5, 0.5, 0.5]) == 0.25
    rng = np.random.default_rng(3)
    y = rng.integers(0, 2, 50).astype(float)
    yh = rng.random(50)
    brute = sum((a - b) ** 2 for a, b in zip(yh, y)) / 50
    assert mspe(y, yh) == pytest.approx(brute, abs=1e-12)
    with pytest.raises(InvalidInputError):
        mspe([1, 0], [0.5])


def test_mspe_bounds_for_probability_predictions():
    rng = np.random.default_rng(4)
    y = rng.integers(0, 2, 30).astype(float)
    yh = rng.random(30)
    assert 0.0 <= mspe(y, yh) <= 1.0


def test_support_from_coefficients():
    coef = np.array([0.0, -0.4, 0.0, 2.0, 1e-9])
    assert support_from_coefficients(coef) == (1, 3, 4)
    assert support_from_coefficients(coef, threshold=1e-6) == (1, 3)
    with pytest.raises(InvalidInputError):
        support_from_coefficients(np.zeros((2, 2)))


def test_competitor_vector_same_report_path():
    coef = np.zeros(100)
    coef[[0, 1, 2]] = [1.0, -2.0, 0.5]
    rep = selection_report(support_from_coefficients(coef), (0, 1, 2), 100)
    assert rep.precision == 1.0 and rep.sensitivity == 1.0 and rep.mcc == 1.0


def test_roc_points():
    y = np.array([1, 1, 0, 0])
    yh = np.array([0.9, 0.6, 0.4, 0.2])
    pts = roc_points(y, yh, [0.0, 0.5, 0.95])
    assert pts[0] == (1.0, 1.0)
    assert pts[1] == (0.0, 1.0)
    assert pts[2] == (0.0, 0.0)


def test_aggregate_skips_undefined():
    reps = [
        selection_report((0,), (0,), 10, mspe=0.2),
        selection_report((), (0,), 10, mspe=0.3),
    ]
    agg = aggregate_reports(reps)
    assert agg["n_replicates"] == 2
    assert agg["n_defined"]["precision"] == 1
    assert agg["mean"]["precision"] == 1.0
    assert agg["mean"]["sensitivity"] == pytest.approx(0.5)
    assert agg["mean"]["mspe"] == pytest.approx(0.25)
    empty = aggregate_reports([selection_report((), (0,), 5)])
    assert empty["mean"]["precision"] is None
    assert empty["mean"]["mspe"] is None
