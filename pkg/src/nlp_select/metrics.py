"""Selection-quality metrics, the prediction rule, and report aggregation.

Zero-denominator conventions: MCC is 0 whenever a factor under the square
root vanishes; precision/sensitivity/specificity are reported as missing
(None) and aggregation averages the defined values only, recording how
many replicates were undefined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .data import Dataset, ModelIndex
from .errors import InvalidInputError
from .laplace import ScoredModel

RATIO_FIELDS = ("precision", "sensitivity", "specificity", "mcc", "mspe")


@dataclass(frozen=True)
class SelectionReport:
    tp: int
    tn: int
    fp: int
    fn: int
    precision: float | None
    sensitivity: float | None
    specificity: float | None
    mcc: float
    mspe: float | None = None


def confusion(
    selected: ModelIndex, truth: ModelIndex, p: int
) -> tuple[int, int, int, int]:
    """(tp, tn, fp, fn) counts over the p covariates."""
    sel, tru = set(selected), set(truth)
    if any(j < 0 or j >= p for j in sel | tru):
        raise InvalidInputError("index sets must lie in [0, p)")
    tp = len(sel & tru)
    fp = len(sel - tru)
    fn = len(tru - sel)
    tn = p - tp - fp - fn
    return tp, tn, fp, fn


def mcc(tp: int, tn: int, fp: int, fn: int) -> float:
    """Matthews correlation coefficient; 0 when any denominator factor is 0."""
    denom2 = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if denom2 == 0:
        return 0.0
    return (tp * tn - fp * fn) / float(np.sqrt(denom2))


def _ratio(num: int, denom: int) -> float | None:
    return num / denom if denom > 0 else None


def selection_report(
    selected: ModelIndex, truth: ModelIndex, p: int, mspe: float | None = None
) -> SelectionReport:
    tp, tn, fp, fn = confusion(selected, truth, p)
    return SelectionReport(
        tp=tp,
        tn=tn,
        fp=fp,
        fn=fn,
        precision=_ratio(tp, tp + fp),
        sensitivity=_ratio(tp, tp + fn),
        specificity=_ratio(tn, tn + fp),
        mcc=mcc(tp, tn, fp, fn),
        mspe=mspe,
    )


def support_from_coefficients(coef, threshold: float = 0.0) -> ModelIndex:
    """Active set of a dense length-p coefficient vector: |coef_j| > threshold.

    The exact-zero default makes externally produced (competitor)
    coefficient vectors comparable through the same reporting path.
    """
    coef = np.asarray(coef, dtype=float)
    if coef.ndim != 1:
        raise InvalidInputError("coefficient vector must be 1-d")
    if threshold < 0:
        raise InvalidInputError("threshold must be nonnegative")
    return tuple(int(j) for j in np.flatnonzero(np.abs(coef) > threshold))


def predict(data_test: Dataset, fitted: ScoredModel) -> np.ndarray:
    """Logistic event probabilities on held-out rows, with the fitted
    coefficients embedded in R^p (zeros off-support)."""
    if any(j >= data_test.p for j in fitted.k):
        raise InvalidInputError("fitted model indexes columns the test data lacks")
    if len(fitted.k) == 0:
        return np.full(data_test.n, 0.5)
    z = data_test.submatrix(fitted.k) @ fitted.beta_hat
    return expit(z)


def mspe(y_test, y_hat) -> float:
    """Mean squared difference between predicted probabilities and outcomes."""
    y_test = np.asarray(y_test, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    if y_test.shape != y_hat.shape:
        raise InvalidInputError(
            f"length mismatch: y_test {y_test.shape} vs y_hat {y_hat.shape}"
        )
    return float(np.mean((y_hat - y_test) ** 2))


def roc_points(y_true, y_hat, thresholds) -> list[tuple[float, float]]:
    """(false positive rate, true positive rate) at each given threshold."""
    y_true = np.asarray(y_true, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    out = []
    pos = float((y_true == 1).sum())
    neg = float((y_true == 0).sum())
    for t in thresholds:
        pred = y_hat >= t
        tp = float(np.sum(pred & (y_true == 1)))
        fp = float(np.sum(pred & (y_true == 0)))
        fpr = fp / neg if neg > 0 else 0.0
        tpr = tp / pos if pos > 0 else 0.0
        out.append((fpr, tpr))
    return out


def aggregate_reports(reports: list[SelectionReport]) -> dict:
    """Column means over replicates, skipping undefined entries.

    Returns {"mean": {...}, "n_defined": {...}, "n_replicates": R}; a metric
    undefined in every replicate averages to None.
    """
    means: dict[str, float | None] = {}
    counts: dict[str, int] = {}
    for name in RATIO_FIELDS:
        vals = [getattr(r, name) for r in reports if getattr(r, name) is not None]
        counts[name] = len(vals)
        means[name] = float(np.mean(vals)) if vals else None
    return {"mean": means, "n_defined": counts, "n_replicates": len(reports)}
