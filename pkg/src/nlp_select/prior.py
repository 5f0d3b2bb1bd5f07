"""Hierarchical nonlocal (hyper-pMOM) prior: scale-marginalized log density,
the per-model objective f and its derivatives, and the model-space prior.

The prior on the active coefficients is a product-moment density with an
Inverse-Gamma(shape lambda1, scale lambda2) hyperprior on its scale. With
U = I the scale integrates out in closed form, giving (up to the pMOM
normalizer d_k = ((2r-1)!!)^{-|k|})

    log pi(b | k) = lambda1*log(lambda2) - lgamma(lambda1) + log d_k
                    - (|k|/2)*log(2*pi) + lgamma(c)
                    - c*log(lambda2 + ||b||^2/2) + 2r * sum_i log|b_i|

with c = r|k| + |k|/2 + lambda1. The exponent on the (lambda2 + ||b||^2/2)
term must match the Gamma argument c for the Inverse-Gamma integral to be
exact; a quadrature cross-check in the test suite pins this down.

The density vanishes whenever any coordinate is exactly zero, so the
log-objective is undefined there and callers must keep iterates strictly
inside an orthant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset, ModelIndex, check_beta
from .errors import InvalidInputError
from .likelihood import LOGISTIC, Likelihood

# Distinguished log-score for models excluded by the size cap. A finite
# sentinel keeps comparisons and JSON serialization total; it underflows to
# probability zero the moment it enters a softmax against any real score.
EXCLUDED = -1e300


def default_lambda2(n: int, p: int) -> float:
    """Inverse-Gamma scale schedule 100 * n^(-1/3) * p^((2+0.001)*2/3).

    Tracks the theory's growth requirement lambda2^(r+1/2) ~ n^(-1/2) p^(2+d)
    at r=1 with d = 0.001.
    """
    if n < 1 or p < 1:
        raise InvalidInputError("n and p must be positive")
    return 100.0 * float(n) ** (-1.0 / 3.0) * float(p) ** ((2.0 + 0.001) * 2.0 / 3.0)


def default_model_cap(n: int, p: int) -> int:
    """Generous sub-linear model-size cap: min(p, 4*ceil(sqrt(n/log p)))."""
    if n < 1 or p < 1:
        raise InvalidInputError("n and p must be positive")
    if p == 1:
        return 1
    return min(p, 4 * math.ceil(math.sqrt(n / math.log(p))))


@dataclass(frozen=True)
class HyperPmomConfig:
    """Prior hyperparameters: pMOM order r, Inverse-Gamma (lambda1, lambda2),
    model-size cap m_n. Only U = I is supported (the closed-form normalizer
    d_k holds only there)."""

    r: int
    lambda1: float
    lambda2: float
    m_n: int
    u_mode: str = "identity"

    def __post_init__(self):
        if self.r < 1:
            raise InvalidInputError("prior order r must be a positive integer")
        if self.lambda1 <= 0 or self.lambda2 <= 0:
            raise InvalidInputError("lambda1 and lambda2 must be positive")
        if self.m_n < 1:
            raise InvalidInputError("model-size cap m_n must be >= 1")
        if self.u_mode != "identity":
            raise InvalidInputError("only u_mode='identity' is supported")

    @classmethod
    def default(cls, n: int, p: int) -> "HyperPmomConfig":
        return cls(
            r=1,
            lambda1=1.0,
            lambda2=default_lambda2(n, p),
            m_n=default_model_cap(n, p),
        )

    def gamma_exponent(self, k_size: int) -> float:
        """c = r|k| + |k|/2 + lambda1, shared by f, grad and Hessian."""
        return self.r * k_size + 0.5 * k_size + self.lambda1


def log_double_factorial(m: int) -> float:
    """log(m!!) for odd m >= -1 (empty product for m <= 0)."""
    out = 0.0
    while m > 1:
        out += math.log(m)
        m -= 2
    return out


def log_norm_const(r: int, k_size: int) -> float:
    """log d_k = -|k| * log((2r-1)!!)."""
    if r < 1 or k_size < 0:
        raise InvalidInputError("need r >= 1 and k_size >= 0")
    return -k_size * log_double_factorial(2 * r - 1)


def _check_nonzero(beta: np.ndarray) -> None:
    if np.any(beta == 0.0):
        raise InvalidInputError(
            "prior density is zero at coordinates equal to 0; "
            "log-objective undefined"
        )


def log_prior_constant(cfg: HyperPmomConfig, k_size: int) -> float:
    """Beta-independent part of log pi(b | k)."""
    c = cfg.gamma_exponent(k_size)
    return (
        cfg.lambda1 * math.log(cfg.lambda2)
        - math.lgamma(cfg.lambda1)
        + log_norm_const(cfg.r, k_size)
        - 0.5 * k_size * math.log(2.0 * math.pi)
        + math.lgamma(c)
    )


def log_prior_density(cfg: HyperPmomConfig, beta: np.ndarray) -> float:
    """log pi(b | k) for |k| = len(b) >= 1 (scale already integrated out)."""
    _check_nonzero(beta)
    c = cfg.gamma_exponent(beta.size)
    d = cfg.lambda2 + 0.5 * float(beta @ beta)
    return (
        log_prior_constant(cfg, beta.size)
        - c * math.log(d)
        + 2.0 * cfg.r * float(np.log(np.abs(beta)).sum())
    )


def log_objective_f(
    data: Dataset,
    cfg: HyperPmomConfig,
    k: ModelIndex,
    beta,
    lik: Likelihood = LOGISTIC,
) -> float:
    """f(b) = log-likelihood + log prior density for the active set k.

    The empty model has no coefficients to integrate, so f is just the
    null log-likelihood.
    """
    b = check_beta(k, beta)
    if len(k) == 0:
        return lik.null_log_lik(data)
    return lik.log_lik(data, k, b) + log_prior_density(cfg, b)


def grad_f(
    data: Dataset,
    cfg: HyperPmomConfig,
    k: ModelIndex,
    beta,
    lik: Likelihood = LOGISTIC,
) -> np.ndarray:
    """Gradient of f: score - c*b/(lambda2 + ||b||^2/2) + 2r/b."""
    b = check_beta(k, beta)
    if len(k) == 0:
        return np.zeros(0)
    _check_nonzero(b)
    c = cfg.gamma_exponent(len(k))
    d = cfg.lambda2 + 0.5 * float(b @ b)
    return lik.score(data, k, b) - (c / d) * b + 2.0 * cfg.r / b


def hessian_V(
    data: Dataset,
    cfg: HyperPmomConfig,
    k: ModelIndex,
    beta,
    lik: Likelihood = LOGISTIC,
) -> np.ndarray:
    """Hessian of f:

        V = -H_n(b) - diag(2r / b_i^2) - c * [I/d - b b^T / d^2],

    with d = lambda2 + ||b||^2/2 and c the shared Gamma exponent. Negative
    definite at any interior maximum of f.
    """
    b = check_beta(k, beta)
    if len(k) == 0:
        return np.zeros((0, 0))
    _check_nonzero(b)
    c = cfg.gamma_exponent(len(k))
    d = cfg.lambda2 + 0.5 * float(b @ b)
    V = -lik.neg_hessian(data, k, b)
    V -= np.diag(2.0 * cfg.r / b**2)
    V -= c * (np.eye(len(k)) / d - np.outer(b, b) / d**2)
    return 0.5 * (V + V.T)


def log_model_prior(cfg: HyperPmomConfig, k: ModelIndex) -> float:
    """Uniform prior over models up to the size cap: log 1 inside,
    the EXCLUDED sentinel outside. Constants of proportionality cancel in
    every posterior ratio."""
    return 0.0 if len(k) <= cfg.m_n else EXCLUDED
