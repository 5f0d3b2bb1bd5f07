import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nlp_select.data import standardize
from nlp_select.simulate import SimDesign, generate

settings.register_profile(
    "ci",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


def rel_err(approx, exact):
    """Max elementwise |a - b| / max(1, max|b|); tolerant of near-zero exact."""
    approx = np.atleast_1d(np.asarray(approx, dtype=float))
    exact = np.atleast_1d(np.asarray(exact, dtype=float))
    scale = max(1.0, float(np.max(np.abs(exact))))
    return float(np.max(np.abs(approx - exact))) / scale


def toy_dataset(n=40, p=5, seed=0, beta=None, support=(0, 1)):
    """Small logistic dataset with optional signal, standardized."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    eta = np.zeros(n)
    if beta is not None:
        eta = X[:, list(support)] @ np.asarray(beta, dtype=float)
    y = (rng.random(n) < 1.0 / (1.0 + np.exp(-eta))).astype(float)
    if y.min() == y.max():  # keep both classes present
        y[0] = 1.0 - y[0]
    return standardize(X, y)


@pytest.fixture
def small_data():
    return toy_dataset(n=40, p=5, seed=0, beta=[1.5, -1.0])


@pytest.fixture
def signal_data():
    train, test, truth = generate(SimDesign(n=100, p=10, signal=2.0, seed=3))
    return train, test, truth
