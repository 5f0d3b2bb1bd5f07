"""Bayesian variable selection for high-dimensional logistic regression
under hierarchical nonlocal (hyper-pMOM) priors: Laplace-approximate model
evidence, shotgun stochastic search over the model space, and a simulation
and evaluation harness."""

from .data import Dataset, ModelIndex, apply_standardization, model_index, standardize
from .errors import InvalidInputError, NumericalFailure
from .laplace import (
    MarginalCache,
    ScoredModel,
    find_mode,
    log_marginal,
    log_posterior_ratio,
    log_unnormalized_posterior,
)
from .likelihood import (
    LOGISTIC,
    Likelihood,
    LogisticLikelihood,
    get_likelihood,
    log_likelihood,
    neg_hessian,
    register_likelihood,
    score,
)
from .metrics import (
    SelectionReport,
    aggregate_reports,
    confusion,
    mcc,
    mspe,
    predict,
    roc_points,
    selection_report,
    support_from_coefficients,
)
from .prior import (
    EXCLUDED,
    HyperPmomConfig,
    default_lambda2,
    default_model_cap,
    grad_f,
    hessian_V,
    log_model_prior,
    log_norm_const,
    log_objective_f,
)
from .search import (
    SearchConfig,
    SearchTrace,
    correlation_ranking,
    neighborhood,
    reduced_neighborhood,
    run_search,
)
from .simulate import MODERATE, WEAK, SimDesign, generate

__version__ = "0.1.0"
