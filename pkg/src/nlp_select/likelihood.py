"""Logistic-regression likelihood machinery and the pluggable GLM seam.

The selection pipeline only ever touches a likelihood through the four
methods of :class:`Likelihood`, so a different GLM can be slotted in by
registering another implementation. Only the logistic likelihood ships
here.
"""

from __future__ import annotations

import math
from typing import Protocol, runtime_checkable

import numpy as np
from scipy.special import expit

from .data import Dataset, ModelIndex, check_beta
from .errors import InvalidInputError


def _linear_predictor(data: Dataset, k: ModelIndex, beta: np.ndarray) -> np.ndarray:
    if len(k) == 0:
        return np.zeros(data.n)
    return data.submatrix(k) @ beta


def softplus(z: np.ndarray) -> np.ndarray:
    """log(1 + exp(z)), stable for |z| up to the double range."""
    z = np.asarray(z, dtype=float)
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def log_likelihood(data: Dataset, k: ModelIndex, beta) -> float:
    """Bernoulli log-likelihood sum_i [y_i z_i - log(1 + e^{z_i})], z = X_k b."""
    b = check_beta(k, beta)
    z = _linear_predictor(data, k, b)
    return float(data.y @ z - softplus(z).sum())


def score(data: Dataset, k: ModelIndex, beta) -> np.ndarray:
    """Gradient of the log-likelihood: X_k^T (y - mu)."""
    b = check_beta(k, beta)
    if len(k) == 0:
        return np.zeros(0)
    Xk = data.submatrix(k)
    mu = expit(Xk @ b)
    return Xk.T @ (data.y - mu)


def neg_hessian(data: Dataset, k: ModelIndex, beta) -> np.ndarray:
    """X_k^T diag(mu(1-mu)) X_k, symmetric positive semidefinite."""
    b = check_beta(k, beta)
    if len(k) == 0:
        return np.zeros((0, 0))
    Xk = data.submatrix(k)
    mu = expit(Xk @ b)
    w = mu * (1.0 - mu)
    H = Xk.T @ (w[:, None] * Xk)
    return 0.5 * (H + H.T)


def null_log_likelihood(data: Dataset) -> float:
    """Log-likelihood of the empty model: every P(y_i=1) = 1/2."""
    return -data.n * math.log(2.0)


@runtime_checkable
class Likelihood(Protocol):
    """Contract every GLM likelihood must satisfy.

    ``score`` must be the gradient of ``log_lik`` and ``neg_hessian`` minus
    its Hessian (positive semidefinite for concave likelihoods); both are
    finite-difference checked in the test suite for each registered
    implementation.
    """

    def log_lik(self, data: Dataset, k: ModelIndex, beta) -> float: ...

    def score(self, data: Dataset, k: ModelIndex, beta) -> np.ndarray: ...

    def neg_hessian(self, data: Dataset, k: ModelIndex, beta) -> np.ndarray: ...

    def null_log_lik(self, data: Dataset) -> float: ...


class LogisticLikelihood:
    """The built-in logistic model, delegating to the module functions."""

    name = "logistic"

    def log_lik(self, data, k, beta):
        return log_likelihood(data, k, beta)

    def score(self, data, k, beta):
        return score(data, k, beta)

    def neg_hessian(self, data, k, beta):
        return neg_hessian(data, k, beta)

    def null_log_lik(self, data):
        return null_log_likelihood(data)


LOGISTIC = LogisticLikelihood()

_REGISTRY: dict[str, Likelihood] = {"logistic": LOGISTIC}


def register_likelihood(name: str, impl: Likelihood) -> None:
    _REGISTRY[name] = impl


def get_likelihood(name: str) -> Likelihood:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise InvalidInputError(
            f"unknown likelihood {name!r}; registered: {sorted(_REGISTRY)}"
        ) from None
