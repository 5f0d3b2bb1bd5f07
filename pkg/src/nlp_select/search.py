"""Model-space exploration: add/remove/swap neighborhoods, shotgun
stochastic search and its reduced variant, and posterior-mode tracking.

Each iteration scores every neighbor of the current state (memoized),
samples one candidate from each of the three neighbor classes with
probability proportional to its unnormalized posterior, then samples the
next state among those candidates the same way. The reported mode is the
best model ever scored, not the final state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, ModelIndex, model_index
from .errors import InvalidInputError
from .laplace import MarginalCache, ScoredModel, log_unnormalized_posterior
from .likelihood import LOGISTIC, Likelihood
from .prior import HyperPmomConfig


@dataclass(frozen=True)
class SearchConfig:
    """Search controls: iteration count N, screened/random addition counts
    (K1, K2) for the reduced algorithm, and the RNG seed."""

    n_iterations: int
    seed: int
    algorithm: str = "rsss"
    k1: int = 10
    k2: int = 10
    initial_model: ModelIndex | str = "random-3"

    def __post_init__(self):
        if self.n_iterations < 1:
            raise InvalidInputError("n_iterations must be >= 1")
        if self.algorithm not in ("sss", "rsss"):
            raise InvalidInputError("algorithm must be 'sss' or 'rsss'")
        if self.k1 < 0 or self.k2 < 0:
            raise InvalidInputError("k1 and k2 must be nonnegative")
        if self.algorithm == "rsss" and self.k1 + self.k2 < 1:
            raise InvalidInputError("rsss needs k1 + k2 >= 1")


@dataclass
class SearchTrace:
    """Chain history plus bookkeeping for search-efficiency comparisons.

    ``visited`` holds (iteration, model, log unnormalized posterior) for the
    realized chain states; ``best`` is the maximum over every model scored,
    and ``models_scored_before_best`` counts fresh scores that happened
    strictly before the best model was first scored.
    """

    visited: list[tuple[int, ModelIndex, float]] = field(default_factory=list)
    best: ScoredModel = None
    best_log_posterior: float = -np.inf
    models_scored_before_best: int = 0
    cache_hits: int = 0
    cache_misses: int = 0


def neighborhood(
    k: ModelIndex, p: int
) -> tuple[list[ModelIndex], list[ModelIndex], list[ModelIndex]]:
    """Full neighbor sets: additions, removals and single swaps."""
    members = set(k)
    outside = [j for j in range(p) if j not in members]
    gamma_plus = [tuple(sorted(k + (j,))) for j in outside]
    gamma_minus = [tuple(i for i in k if i != j) for j in k]
    gamma_zero = [
        tuple(sorted([i for i in k if i != j] + [l])) for j in k for l in outside
    ]
    return gamma_plus, gamma_minus, gamma_zero


def correlation_ranking(data: Dataset) -> np.ndarray:
    """Column indices ordered by decreasing |corr(X_j, y)|, ties to the
    lower index. Computed once per dataset; a constant response yields the
    all-zero ranking (pure index order)."""
    y = data.y
    yc = y - y.mean()
    sy = float(np.sqrt((yc @ yc)))
    if sy == 0.0:
        score = np.zeros(data.p)
    else:
        Xc = data.X - data.X.mean(axis=0)
        sx = np.sqrt((Xc * Xc).sum(axis=0))
        with np.errstate(divide="ignore", invalid="ignore"):
            score = np.abs(Xc.T @ yc) / (sx * sy)
        score = np.where(np.isfinite(score), score, 0.0)
    order = np.lexsort((np.arange(data.p), -score))
    return order


def reduced_neighborhood(
    k: ModelIndex,
    data: Dataset,
    cfg: SearchConfig,
    rng: np.random.Generator,
    corr_order: np.ndarray | None = None,
) -> tuple[list[ModelIndex], list[ModelIndex], list[ModelIndex]]:
    """Neighbor sets with additions restricted to the top-K1 correlation
    screen plus K2 uniformly drawn extras; removals are untouched and swaps
    only use the screened addition candidates."""
    if corr_order is None:
        corr_order = correlation_ranking(data)
    members = set(k)
    ranked_outside = [int(j) for j in corr_order if j not in members]
    screened = ranked_outside[: cfg.k1]
    pool = np.array(ranked_outside[cfg.k1 :], dtype=int)
    if pool.size <= cfg.k2:
        extras = [int(j) for j in pool]
    else:
        extras = [int(j) for j in rng.choice(pool, size=cfg.k2, replace=False)]
    additions = sorted(screened + extras)
    gamma_plus = [tuple(sorted(k + (j,))) for j in additions]
    gamma_minus = [tuple(i for i in k if i != j) for j in k]
    gamma_zero = [
        tuple(sorted([i for i in k if i != j] + [l])) for j in k for l in additions
    ]
    return gamma_plus, gamma_minus, gamma_zero


def sample_from_log_weights(rng: np.random.Generator, log_weights) -> int:
    """Categorical draw with probabilities proportional to exp(log_weights),
    stabilized by subtracting the maximum before exponentiating."""
    lw = np.asarray(log_weights, dtype=float)
    if lw.size == 0:
        raise InvalidInputError("cannot sample from an empty candidate set")
    w = np.exp(lw - lw.max())
    return int(rng.choice(lw.size, p=w / w.sum()))


def _initial_model(cfg: SearchConfig, p: int, m_n: int, rng) -> ModelIndex:
    if cfg.initial_model == "random-3":
        size = min(3, p, m_n)
        return tuple(sorted(int(j) for j in rng.choice(p, size=size, replace=False)))
    k0 = model_index(cfg.initial_model, p)
    if len(k0) > m_n:
        raise InvalidInputError("initial model exceeds the size cap m_n")
    return k0


def run_search(
    data: Dataset,
    prior_cfg: HyperPmomConfig,
    search_cfg: SearchConfig,
    lik: Likelihood = LOGISTIC,
    optimizer_max_iterations: int = 500,
) -> SearchTrace:
    """Run SSS or RSSS for n_iterations steps and return the trace.

    Every model scored anywhere in the run competes for ``trace.best``.
    Neighbors above the size cap get probability zero (they are skipped,
    not fitted); a class whose eligible set is empty simply contributes no
    candidate to the final three-way draw.
    """
    rng = np.random.default_rng(search_cfg.seed)
    cache = MarginalCache(data, prior_cfg, lik, max_iterations=optimizer_max_iterations)
    trace = SearchTrace()
    corr_order = (
        correlation_ranking(data) if search_cfg.algorithm == "rsss" else None
    )

    def score(k: ModelIndex) -> float:
        before = cache.misses
        sm = cache.score(k)
        lp = log_unnormalized_posterior(sm, prior_cfg)
        if cache.misses > before and lp > trace.best_log_posterior:
            trace.best = sm
            trace.best_log_posterior = lp
            trace.models_scored_before_best = before
        return lp

    current = _initial_model(search_cfg, data.p, prior_cfg.m_n, rng)
    trace.visited.append((0, current, score(current)))

    for it in range(1, search_cfg.n_iterations):
        if search_cfg.algorithm == "sss":
            sets = neighborhood(current, data.p)
        else:
            sets = reduced_neighborhood(
                current, data, search_cfg, rng, corr_order=corr_order
            )
        winners: list[tuple[ModelIndex, float]] = []
        for models in sets:
            eligible = [k for k in models if len(k) <= prior_cfg.m_n]
            if not eligible:
                continue
            log_posts = [score(k) for k in eligible]
            pick = sample_from_log_weights(rng, log_posts)
            winners.append((eligible[pick], log_posts[pick]))
        if not winners:
            raise RuntimeError("all neighbor sets empty; cannot advance the chain")
        pick = sample_from_log_weights(rng, [lp for _, lp in winners])
        current, current_lp = winners[pick]
        trace.visited.append((it, current, current_lp))

    trace.cache_hits = cache.hits
    trace.cache_misses = cache.misses
    return trace
