"""Synthetic data generation for the selection experiments.

Covariate rows are i.i.d. N_p(0, Sigma) (isotropic or AR(1) with rho=0.3);
responses are Bernoulli with logistic probabilities computed from the RAW
covariates and the true coefficients, after which the training columns are
standardized and the test columns mapped with the train-derived transform
(no leakage).

Draw order given the seed is part of the contract: train X, train
uniforms, test X, test uniforms. Tests rely on it to verify that y depends
on X only through the true support.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .data import Dataset, ModelIndex, apply_standardization, model_index, standardize
from .errors import InvalidInputError

WEAK = 1.0
MODERATE = 2.0

_COVARIANCES = ("isotropic", "ar1")


@dataclass(frozen=True)
class SimDesign:
    """One simulation scenario: sizes, signal strength, design covariance,
    true support and seed."""

    n: int = 100
    p: int = 100
    n_test: int = 50
    signal: float = MODERATE
    covariance: str = "isotropic"
    ar_rho: float = 0.3
    true_support: ModelIndex = (0, 1, 2)
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise InvalidInputError("need n >= 2 to standardize the design")
        if self.p < 1 or self.n_test < 1:
            raise InvalidInputError("p and n_test must be positive")
        if self.signal <= 0:
            raise InvalidInputError("signal magnitude must be positive")
        if self.covariance not in _COVARIANCES:
            raise InvalidInputError(f"covariance must be one of {_COVARIANCES}")
        if not (0.0 <= self.ar_rho < 1.0):
            raise InvalidInputError("ar_rho must lie in [0, 1)")
        object.__setattr__(
            self, "true_support", model_index(self.true_support, self.p)
        )


def ar1_cholesky(p: int, rho: float) -> np.ndarray:
    """Cholesky factor of the AR(1) covariance Sigma_ij = rho^|i-j|."""
    idx = np.arange(p)
    sigma = rho ** np.abs(idx[:, None] - idx[None, :])
    return np.linalg.cholesky(sigma)


def _draw_rows(rng: np.random.Generator, n: int, p: int, chol) -> np.ndarray:
    z = rng.standard_normal((n, p))
    return z if chol is None else z @ chol.T


def generate(design: SimDesign) -> tuple[Dataset, Dataset, tuple[ModelIndex, np.ndarray]]:
    """Simulate (train, test, truth) for one replicate of a design."""
    rng = np.random.default_rng(design.seed)
    chol = None
    if design.covariance == "ar1":
        chol = ar1_cholesky(design.p, design.ar_rho)
    support = design.true_support
    beta0 = np.full(len(support), float(design.signal))

    X_train_raw = _draw_rows(rng, design.n, design.p, chol)
    probs = expit(X_train_raw[:, list(support)] @ beta0)
    y_train = (rng.random(design.n) < probs).astype(float)

    X_test_raw = _draw_rows(rng, design.n_test, design.p, chol)
    probs_test = expit(X_test_raw[:, list(support)] @ beta0)
    y_test = (rng.random(design.n_test) < probs_test).astype(float)

    train = standardize(X_train_raw, y_train)
    X_test = apply_standardization(X_test_raw, train.column_means, train.column_sds)
    test = Dataset(
        X=X_test,
        y=y_test,
        column_means=train.column_means,
        column_sds=train.column_sds,
    )
    return train, test, (support, beta0)
