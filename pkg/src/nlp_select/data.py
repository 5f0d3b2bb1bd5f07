"""Dataset container, model-index helpers and column standardization.

A "model" is an ordered tuple of 0-based column indices into the design
matrix; the active coefficient vector is a plain float array aligned with
that tuple. Both are kept as primitive types so they can be used as dict
keys and passed around cheaply.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

ModelIndex = tuple[int, ...]

EMPTY_MODEL: ModelIndex = ()

# Mean / sd of every column must sit this close to 0 / 1 after standardization.
STANDARDIZATION_TOL = 1e-10


def model_index(indices, p: int) -> ModelIndex:
    """Validate and canonicalize a collection of covariate indices.

    Indices must be distinct integers in [0, p); the result is sorted
    ascending.
    """
    idx = tuple(int(j) for j in indices)
    if len(set(idx)) != len(idx):
        raise InvalidInputError(f"duplicate indices in model: {idx}")
    if any(j < 0 or j >= p for j in idx):
        raise InvalidInputError(f"model indices {idx} out of range [0, {p})")
    return tuple(sorted(idx))


def check_beta(k: ModelIndex, beta) -> np.ndarray:
    """Validate an active-coefficient vector against a model index."""
    b = np.asarray(beta, dtype=float)
    if b.shape != (len(k),):
        raise InvalidInputError(
            f"coefficient vector has shape {b.shape}, expected ({len(k)},)"
        )
    if not np.all(np.isfinite(b)):
        raise InvalidInputError("coefficient vector contains non-finite entries")
    return b


@dataclass(frozen=True, eq=False)
class Dataset:
    """Design matrix and binary response, with standardization metadata.

    ``X`` is n x p; ``y`` holds 0/1 values. ``column_means`` / ``column_sds``
    record the raw-scale location/scale that was divided out, so held-out
    data can be mapped onto the same scale (identity transform if the data
    were never standardized through :func:`standardize`).
    """

    X: np.ndarray
    y: np.ndarray
    column_means: np.ndarray = field(default=None)
    column_sds: np.ndarray = field(default=None)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2:
            raise InvalidInputError("X must be a 2-d array")
        if X.shape[0] < 1 or X.shape[1] < 1:
            raise InvalidInputError("X needs at least one row and one column")
        if y.shape != (X.shape[0],):
            raise InvalidInputError(
                f"y has shape {y.shape}, expected ({X.shape[0]},)"
            )
        if not np.all((y == 0.0) | (y == 1.0)):
            raise InvalidInputError("y entries must all be 0 or 1")
        if not np.all(np.isfinite(X)):
            raise InvalidInputError("X contains non-finite entries")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        means = self.column_means
        sds = self.column_sds
        means = np.zeros(X.shape[1]) if means is None else np.asarray(means, float)
        sds = np.ones(X.shape[1]) if sds is None else np.asarray(sds, float)
        if means.shape != (X.shape[1],) or sds.shape != (X.shape[1],):
            raise InvalidInputError("standardization metadata has wrong length")
        object.__setattr__(self, "column_means", means)
        object.__setattr__(self, "column_sds", sds)
        self.X.setflags(write=False)
        self.y.setflags(write=False)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def submatrix(self, k: ModelIndex) -> np.ndarray:
        """Columns of X for the active set, as a contiguous array."""
        return np.ascontiguousarray(self.X[:, list(k)])


def standardize(X_raw, y) -> Dataset:
    """Center and scale each column to mean 0, sample sd 1 (ddof=1).

    Constant columns have no well-defined scale and are rejected.
    """
    X_raw = np.asarray(X_raw, dtype=float)
    if X_raw.ndim != 2:
        raise InvalidInputError("X must be a 2-d array")
    if X_raw.shape[0] < 2:
        raise InvalidInputError("standardization needs at least 2 rows")
    means = X_raw.mean(axis=0)
    sds = X_raw.std(axis=0, ddof=1)
    bad = np.flatnonzero(sds <= 0)
    if bad.size:
        raise InvalidInputError(
            f"constant column(s) cannot be standardized: {bad.tolist()}"
        )
    X = (X_raw - means) / sds
    return Dataset(X=X, y=y, column_means=means, column_sds=sds)


def apply_standardization(X_raw, means, sds) -> np.ndarray:
    """Map raw covariates onto a previously fitted standardization."""
    X_raw = np.asarray(X_raw, dtype=float)
    means = np.asarray(means, dtype=float)
    sds = np.asarray(sds, dtype=float)
    if np.any(sds <= 0):
        raise InvalidInputError("standardization sds must be positive")
    return (X_raw - means) / sds
