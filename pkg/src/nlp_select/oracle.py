"""Brute-force reference implementations used to validate the fast paths:
finite differences, golden-section search, orthant-decomposed adaptive
quadrature of the model evidence (dimensions 1 and 2 only), the fully
hierarchical (coefficient, scale) quadrature, and exhaustive model
enumeration.

Nothing here is called from production paths; correctness and independence
from the code under test matter more than speed.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .data import Dataset, ModelIndex
from .errors import InvalidInputError
from .laplace import ScoredModel, find_mode, log_marginal, ridge_start
from .likelihood import LOGISTIC, Likelihood, softplus
from .prior import (
    HyperPmomConfig,
    hessian_V,
    log_norm_const,
    log_prior_constant,
)

# Integration boxes extend this many posterior sds past each orthant mode;
# wide enough that the integrand at the boundary is far below 1e-12 of its
# peak.
DOMAIN_HALF_WIDTH_SDS = 10.0


def finite_diff_gradient(fn, x, h: float = 1e-6) -> np.ndarray:
    """Central-difference gradient with per-coordinate steps h*max(1,|x_i|)."""
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(x.size):
        step = h * max(1.0, abs(x[i]))
        lo, hi = x.copy(), x.copy()
        lo[i] -= step
        hi[i] += step
        g[i] = (fn(hi) - fn(lo)) / (2.0 * step)
    return g


def finite_diff_jacobian(vec_fn, x, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of a vector-valued function."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        step = h * max(1.0, abs(x[i]))
        lo, hi = x.copy(), x.copy()
        lo[i] -= step
        hi[i] += step
        cols.append((np.asarray(vec_fn(hi)) - np.asarray(vec_fn(lo))) / (2.0 * step))
    return np.column_stack(cols)


def golden_section_max(fn, lo: float, hi: float, tol: float = 1e-8) -> float:
    """Argmax of a unimodal scalar function on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def _f_batch(data, cfg, k, B, lik):
    """f evaluated at each row of B (M x |k|), vectorized for the logistic
    likelihood and loop-based otherwise."""
    m = len(k)
    const = log_prior_constant(cfg, m)
    c = cfg.gamma_exponent(m)
    D = cfg.lambda2 + 0.5 * (B * B).sum(axis=1)
    prior_part = const - c * np.log(D) + 2.0 * cfg.r * np.log(np.abs(B)).sum(axis=1)
    if isinstance(lik, type(LOGISTIC)):
        Xk = data.submatrix(k)
        Z = Xk @ B.T
        ll = data.y @ Z - softplus(Z).sum(axis=0)
        return ll + prior_part
    ll = np.array([lik.log_lik(data, k, b) for b in B])
    return ll + prior_part


def _gl_nodes(lo: float, hi: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    return mid + half * x, half * w


def _orthant_boxes(data, cfg, k, lik):
    """Per-orthant integration boxes [lo, hi] in magnitude coordinates,
    centered on that orthant's own mode of f."""
    m = len(k)
    base = np.maximum(np.abs(ridge_start(data, k, lik)), 0.1)
    boxes = []
    for signs in itertools.product((1.0, -1.0), repeat=m):
        s = np.array(signs)
        mode, _ = find_mode(data, cfg, k, init=s * base, lik=lik)
        negV = -hessian_V(data, cfg, k, mode, lik)
        try:
            cov = np.linalg.inv(negV)
            sds = np.sqrt(np.maximum(np.diag(cov), 1e-12))
        except np.linalg.LinAlgError:
            sds = np.ones(m)
        mag = np.abs(mode)
        lo = np.maximum(0.0, mag - DOMAIN_HALF_WIDTH_SDS * sds)
        hi = mag + DOMAIN_HALF_WIDTH_SDS * sds
        boxes.append((s, lo, hi))
    return boxes


def _log_integral_orthants(log_f_on_grid, boxes, n_nodes):
    """Sum exp(f) over the per-orthant tensor grids, in log space."""
    pieces = []
    for s, lo, hi in boxes:
        m = s.size
        axes = [_gl_nodes(lo[i], hi[i], n_nodes) for i in range(m)]
        if m == 1:
            pts = axes[0][0][:, None] * s[0]
            logw = np.log(axes[0][1])
        else:
            g0, g1 = np.meshgrid(axes[0][0], axes[1][0], indexing="ij")
            pts = np.column_stack([g0.ravel() * s[0], g1.ravel() * s[1]])
            w0, w1 = np.meshgrid(axes[0][1], axes[1][1], indexing="ij")
            logw = np.log((w0 * w1).ravel())
        logf = log_f_on_grid(pts)
        shift = logf.max()
        pieces.append(shift + math.log(np.exp(logf - shift + logw).sum()))
    top = max(pieces)
    return top + math.log(sum(math.exp(v - top) for v in pieces))


def quadrature_marginal(
    data: Dataset,
    cfg: HyperPmomConfig,
    k: ModelIndex,
    lik: Likelihood = LOGISTIC,
    rtol: float = 1e-6,
    start_nodes: int = 32,
    max_doublings: int = 6,
) -> float:
    """log of the exact model evidence integral of exp(f) over R^|k|.

    The integrand vanishes on every coordinate hyperplane, so each orthant
    is integrated separately (tensor Gauss-Legendre) and the per-axis node
    count is doubled until two successive refinements agree to rtol.
    """
    if len(k) == 0:
        return lik.null_log_lik(data)
    if len(k) > 2:
        raise InvalidInputError("quadrature oracle supports |k| <= 2 only")
    if not (0.0 < rtol < 1.0):
        raise InvalidInputError("rtol must lie in (0, 1)")
    boxes = _orthant_boxes(data, cfg, k, lik)

    def log_f_on_grid(pts):
        return _f_batch(data, cfg, k, pts, lik)

    n = start_nodes
    prev = _log_integral_orthants(log_f_on_grid, boxes, n)
    for _ in range(max_doublings):
        n *= 2
        cur = _log_integral_orthants(log_f_on_grid, boxes, n)
        if abs(cur - prev) < rtol:
            return cur
        prev = cur
    raise InvalidInputError(
        f"quadrature did not stabilize to rtol={rtol} within {max_doublings} doublings"
    )


def hierarchical_marginal_1d(
    data: Dataset,
    cfg: HyperPmomConfig,
    k: ModelIndex,
    rtol: float = 1e-6,
    start_nodes: int = 64,
    max_doublings: int = 6,
) -> float:
    """log of the model evidence computed WITHOUT the closed-form scale
    marginalization: a 2-d quadrature over (coefficient, scale) of
    exp(log-lik) * pmom(beta | tau) * inv-gamma(tau), |k| = 1 only.

    The scale axis is integrated in u = log(tau); for fixed beta the
    u-integrand is exp(-a e^{-u} - b u) with a = lambda2 + beta^2/2 and
    b = r + 1/2 + lambda1, peaked at u* = log(a/b).
    """
    if len(k) != 1:
        raise InvalidInputError("hierarchical oracle is 1-d only")
    Xk = data.submatrix(k)[:, 0]
    y = data.y
    r, lam1, lam2 = cfg.r, cfg.lambda1, cfg.lambda2
    b_exp = r + 0.5 + lam1
    const = (
        log_norm_const(r, 1)
        - 0.5 * math.log(2.0 * math.pi)
        + lam1 * math.log(lam2)
        - math.lgamma(lam1)
    )
    u_lo_off, u_hi_off = -8.0, 45.0

    def log_integrand_beta(betas, n_u):
        """log of the tau-integrated integrand at each beta (vectorized)."""
        z = np.outer(Xk, betas)
        ll = y @ z - softplus(z).sum(axis=0)
        a = lam2 + 0.5 * betas**2
        u_star = np.log(a / b_exp)
        nodes, w = _gl_nodes(u_lo_off, u_hi_off, n_u)
        U = u_star[:, None] + nodes[None, :]
        g = -a[:, None] * np.exp(-U) - b_exp * U
        shift = g.max(axis=1)
        inner = shift + np.log((np.exp(g - shift[:, None]) * w[None, :]).sum(axis=1))
        return ll + const + 2.0 * r * np.log(np.abs(betas)) + inner

    boxes = _orthant_boxes(data, cfg, k, LOGISTIC)

    def run(n_nodes):
        pieces = []
        for s, lo, hi in boxes:
            pts, w = _gl_nodes(lo[0], hi[0], n_nodes)
            logf = log_integrand_beta(pts * s[0], n_nodes)
            shift = logf.max()
            pieces.append(shift + math.log(np.exp(logf - shift + np.log(w)).sum()))
        top = max(pieces)
        return top + math.log(sum(math.exp(v - top) for v in pieces))

    n = start_nodes
    prev = run(n)
    for _ in range(max_doublings):
        n *= 2
        cur = run(n)
        if abs(cur - prev) < rtol:
            return cur
        prev = cur
    raise InvalidInputError("hierarchical quadrature did not stabilize")


def exhaustive_mode(
    data: Dataset,
    cfg: HyperPmomConfig,
    max_size: int | None = None,
    lik: Likelihood = LOGISTIC,
) -> ScoredModel:
    """Posterior-mode model by scoring every subset up to the size cap.

    Refuses p > 15. Ties break toward the smaller model, then
    lexicographically.
    """
    if data.p > 15:
        raise InvalidInputError("exhaustive enumeration refused for p > 15")
    cap = cfg.m_n if max_size is None else min(max_size, cfg.m_n)
    cap = min(cap, data.p)
    best: ScoredModel | None = None
    best_lp = -math.inf
    for size in range(cap + 1):
        for combo in itertools.combinations(range(data.p), size):
            sm = log_marginal(data, cfg, combo, lik=lik)
            lp = sm.log_laplace_marginal
            if (
                best is None
                or lp > best_lp
                or (lp == best_lp and (len(combo), combo) < (len(best.k), best.k))
            ):
                best, best_lp = sm, lp
    assert best is not None and best_lp >= best.log_laplace_marginal - 1e-12
    return best
