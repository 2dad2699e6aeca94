"""Penalized empirical-risk solvers.

FISTA (accelerated proximal gradient with backtracking and momentum
restart) covers objectives with a single nonsmooth term on A; a
PRISMA-style splitting handles l1 + trace-norm together by smoothing the
trace norm with a decreasing parameter while taking exact prox steps on
the l1 + nonnegativity term.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .features import PenaltyWeights, compute_stats, \
    constant_weights, practical_weights
from .loss import build_loglik_cache, least_squares, neg_log_likelihood_cached, \
    precompute_gram
from .penalty import PenaltySpec, pen_value, prox_l1_nonneg, prox_trace


@dataclass(frozen=True)
class FitConfig:
    penalty: PenaltySpec
    loss_kind: str = "least-squares"  # or "log-likelihood"
    max_iter: int = 100
    tol: float = 1e-7
    step0: float = 1.0
    shrink: float = 0.5
    growth: float = 2.0
    init: Optional[Tuple[np.ndarray, np.ndarray]] = None
    prisma_beta0: float = 1.0

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must be in (0, 1)")
        if self.loss_kind not in ("least-squares", "log-likelihood"):
            raise ValueError(f"unknown loss_kind {self.loss_kind!r}")


@dataclass
class FitResult:
    mu: np.ndarray
    A: np.ndarray
    objective_trace: list
    iterations_used: int
    converged: bool
    final_step: float
    solver: str
    sufficient_decrease_ok: bool = True

    def as_dict(self) -> dict:
        return {
            "iterations_used": self.iterations_used,
            "converged": self.converged,
            "final_step": self.final_step,
            "solver": self.solver,
            "sufficient_decrease_ok": self.sufficient_decrease_ok,
            "final_objective": self.objective_trace[-1] if self.objective_trace else None,
        }


class LineSearchError(RuntimeError):
    pass


def _inner(dmu, dA, gmu, gA) -> float:
    return float(np.sum(dmu * gmu) + np.sum(dA * gA))


def _sqnorm(dmu, dA) -> float:
    return float(np.sum(dmu * dmu) + np.sum(dA * dA))


def _backtrack(smooth, prox, y_mu, y_A, f_y, g_mu, g_A, step, shrink):
    """Shrink step until the quadratic upper bound holds at the prox point."""
    while True:
        x_mu, x_A = prox(y_mu - step * g_mu, y_A - step * g_A, step)
        f_new = smooth(x_mu, x_A)[0]
        d_mu, d_A = x_mu - y_mu, x_A - y_A
        bound = f_y + _inner(d_mu, d_A, g_mu, g_A) + _sqnorm(d_mu, d_A) / (2 * step)
        if np.isfinite(f_new) and f_new <= bound + 1e-12 * max(1.0, abs(bound)):
            return x_mu, x_A, f_new, step
        step *= shrink
        if step < 1e-16:
            raise LineSearchError("line search failed (step underflow)")


def fit_fista(smooth: Callable, prox: Callable, pen: Callable,
              mu0: np.ndarray, A0: np.ndarray, config: FitConfig,
              solver_name: str = "fista") -> FitResult:
    """Accelerated proximal gradient with backtracking and momentum restart.

    ``smooth(mu, A) -> (value, grad_mu, grad_A)``; ``prox(mu, A, step)``
    is the prox of the nonsmooth part; ``pen(mu, A)`` its value.  Returns
    the best iterate by penalized objective.
    """
    x_mu, x_A = mu0.copy(), A0.copy()
    y_mu, y_A = x_mu.copy(), x_A.copy()
    t_mom = 1.0
    step = config.step0
    f0 = smooth(x_mu, x_A)[0]
    if not np.isfinite(f0):
        raise LineSearchError("infeasible starting point")
    obj_prev = f0 + pen(x_mu, x_A)
    best = (x_mu.copy(), x_A.copy(), obj_prev)
    trace = []
    converged = False
    iters = 0
    for k in range(config.max_iter):
        f_y, g_mu, g_A = smooth(y_mu, y_A)
        if not np.isfinite(f_y):
            # momentum overshot the feasible region; restart from x
            y_mu, y_A = x_mu.copy(), x_A.copy()
            t_mom = 1.0
            f_y, g_mu, g_A = smooth(y_mu, y_A)
        xn_mu, xn_A, f_new, step = _backtrack(
            smooth, prox, y_mu, y_A, f_y, g_mu, g_A, step, config.shrink)
        obj = f_new + pen(xn_mu, xn_A)
        trace.append(obj)
        iters = k + 1
        if obj < best[2]:
            best = (xn_mu.copy(), xn_A.copy(), obj)
        if obj > obj_prev:  # safeguard: restart momentum on objective increase
            t_new = 1.0
            y_mu, y_A = xn_mu.copy(), xn_A.copy()
        else:
            t_new = (1.0 + math.sqrt(1.0 + 4.0 * t_mom * t_mom)) / 2.0
            beta = (t_mom - 1.0) / t_new
            y_mu = xn_mu + beta * (xn_mu - x_mu)
            y_A = xn_A + beta * (xn_A - x_A)
        if abs(obj - obj_prev) / max(1.0, abs(obj)) < config.tol:
            x_mu, x_A = xn_mu, xn_A
            converged = True
            break
        x_mu, x_A = xn_mu, xn_A
        t_mom = t_new
        obj_prev = obj
        step *= config.growth
    return FitResult(mu=best[0], A=best[1], objective_trace=trace,
                     iterations_used=iters, converged=converged,
                     final_step=step, solver=solver_name)


def fit_prisma(smooth_loss: Callable, weights: PenaltyWeights,
               pen_spec: PenaltySpec, mu0: np.ndarray, A0: np.ndarray,
               config: FitConfig) -> FitResult:
    """Three-term splitting for l1 + nonneg + trace-norm objectives.

    The trace norm is replaced by its Moreau envelope with smoothing
    beta_k = beta0 / k (gradient computable via singular value
    thresholding); the l1 + nonnegativity prox stays exact.  The best
    iterate by the true (unsmoothed) objective is returned, with a
    terminal projection of A onto the nonnegative orthant.
    """
    tau = weights.tau
    beta0 = config.prisma_beta0

    def true_pen(mu, A):
        return pen_value(mu, A, pen_spec)

    def prox_l1(v_mu, v_A, step):
        p_mu = prox_l1_nonneg(v_mu, weights.w, step) if pen_spec.use_l1_mu \
            else np.maximum(v_mu, 0.0)
        p_A = prox_l1_nonneg(v_A, weights.W, step) if pen_spec.use_l1_A \
            else np.maximum(v_A, 0.0)
        return p_mu, p_A

    x_mu, x_A = mu0.copy(), A0.copy()
    step = config.step0
    f0 = smooth_loss(x_mu, x_A)[0]
    if not np.isfinite(f0):
        raise LineSearchError("infeasible starting point")
    obj_prev = f0 + true_pen(x_mu, x_A)
    best = (x_mu.copy(), x_A.copy(), obj_prev)
    trace = []
    converged = False
    iters = 0
    for k in range(1, config.max_iter + 1):
        beta_k = beta0 / k

        def smooth_k(mu, A, _b=beta_k):
            val, gmu, gA = smooth_loss(mu, A)
            if not np.isfinite(val):
                return val, gmu, gA
            if tau > 0:
                P = prox_trace(A, _b * tau)
                R = A - P
                val += tau * np.linalg.svd(P, compute_uv=False).sum() \
                    + _sqnorm(np.zeros(0), R) / (2 * _b)
                gA = gA + R / _b
            return val, gmu, gA

        f_x, g_mu, g_A = smooth_k(x_mu, x_A)
        xn_mu, xn_A, _, step = _backtrack(
            smooth_k, prox_l1, x_mu, x_A, f_x, g_mu, g_A, step, config.shrink)
        obj = smooth_loss(xn_mu, xn_A)[0] + true_pen(xn_mu, xn_A)
        trace.append(obj)
        iters = k
        if obj < best[2]:
            best = (xn_mu.copy(), xn_A.copy(), obj)
        if abs(obj - obj_prev) / max(1.0, abs(obj)) < config.tol:
            x_mu, x_A = xn_mu, xn_A
            converged = True
            break
        x_mu, x_A = xn_mu, xn_A
        obj_prev = obj
        step *= config.growth
    return FitResult(mu=best[0], A=np.maximum(best[1], 0.0),
                     objective_trace=trace, iterations_used=iters,
                     converged=converged, final_step=step, solver="prisma")


def _make_loss_oracle(data, alpha, loss_kind: str):
    if loss_kind == "least-squares":
        gram = precompute_gram(data, alpha)

        def smooth(mu, A):
            out = least_squares(mu, A, gram)
            return out.value, out.grad_mu, out.grad_A
    else:
        cache = build_loglik_cache(data, alpha)

        def smooth(mu, A):
            out = neg_log_likelihood_cached(mu, A, cache)
            return out.value, out.grad_mu, out.grad_A
    return smooth


def _default_init(data, loss_kind: str):
    d, T = data.d, data.horizon_T
    if loss_kind == "log-likelihood":
        # counts/T keeps every event at positive intensity
        mu0 = np.maximum(data.counts / T, 1e-10)
    else:
        mu0 = np.zeros(d)
    return mu0, np.zeros((d, d))


def fit_hawkes(data, alpha, config: FitConfig) -> FitResult:
    """Dispatch to FISTA or PRISMA depending on the active penalty terms."""
    spec = config.penalty
    weights = spec.weights
    smooth = _make_loss_oracle(data, alpha, config.loss_kind)
    if config.init is not None:
        mu0, A0 = np.array(config.init[0], dtype=float), np.array(config.init[1], dtype=float)
    else:
        mu0, A0 = _default_init(data, config.loss_kind)

    has_trace = spec.use_trace and weights.tau > 0
    if has_trace and spec.use_l1_A:
        return fit_prisma(smooth, weights, spec, mu0, A0, config)

    def pen(mu, A):
        return pen_value(mu, A, spec)

    if has_trace:
        # trace norm alone on A: SVT iterate may leave the orthant;
        # project at the end (domain constraint)
        def prox(v_mu, v_A, step):
            p_mu = prox_l1_nonneg(v_mu, weights.w, step) if spec.use_l1_mu \
                else np.maximum(v_mu, 0.0)
            return p_mu, prox_trace(v_A, step * weights.tau)

        res = fit_fista(smooth, prox, pen, mu0, A0, config,
                        solver_name="fista-trace")
        res.A = np.maximum(res.A, 0.0)
        return res

    def prox(v_mu, v_A, step):
        p_mu = prox_l1_nonneg(v_mu, weights.w, step) if spec.use_l1_mu \
            else np.maximum(v_mu, 0.0)
        p_A = prox_l1_nonneg(v_A, weights.W, step) if spec.use_l1_A \
            else np.maximum(v_A, 0.0)
        return p_mu, p_A

    return fit_fista(smooth, prox, pen, mu0, A0, config)


@dataclass(frozen=True)
class CVResult:
    best: Tuple[float, float, float]  # (c1, c2, tau)
    scores: list  # rows of (c1, c2, tau, heldout_loglik)
    fit: FitResult  # refit with the winning constants


def heldout_loglik(mu, A, test_data, alpha, clip: float = 1e-12) -> float:
    """Log-likelihood of (mu, A) on a held-out window (higher is better).

    Intensities are clipped away from zero so hard-thresholded baselines do
    not produce -inf for every candidate.
    """
    cache = build_loglik_cache(test_data, alpha)
    mu = np.asarray(mu, dtype=float)
    A = np.asarray(A, dtype=float)
    T = cache.horizon_T
    total = 0.0
    for j in range(cache.d):
        H = cache.H_at_events[j]
        lam = np.maximum(mu[j] + (H @ A[j] if H.size else 0.0), clip)
        total += float(np.log(lam).sum()) if np.size(lam) else 0.0
        total -= mu[j] * T + float(A[j] @ cache.int_H[j])
    return total


def cross_validate(data, alpha, config: FitConfig,
                   c1_grid: Sequence[float], c2_grid: Sequence[float],
                   tau_grid: Sequence[float] = (0.0,),
                   weighting: str = "practical") -> CVResult:
    """Tune (c1, c2, tau) by a half/half time split of the window.

    Fits on [0, T/2], scores by log-likelihood on the re-based second half
    (cold start: the test window's excitation ignores pre-split events),
    then refits on the full window with the winning constants.
    """
    if not c1_grid or not c2_grid or not tau_grid:
        raise ValueError("grids must be nonempty")
    T = data.horizon_T
    if T < 2:
        raise ValueError("window too short to split")
    train = data.truncated(T / 2)
    test = data.shifted(T / 2, T / 2)
    if train.total_events() == 0 or test.total_events() == 0:
        raise ValueError("empty train or test half")

    train_stats = compute_stats(train, alpha)
    smooth = _make_loss_oracle(train, alpha, config.loss_kind)
    mu0, A0 = _default_init(train, config.loss_kind)

    def build_weights(stats, c1, c2, tau):
        if weighting == "practical":
            return practical_weights(stats, c1, c2, tau)
        if weighting == "constant":
            return constant_weights(stats.d, c1, c2, tau)
        raise ValueError(f"unknown weighting {weighting!r}")

    def fit_with(stats, smooth_fn, c1, c2, tau, init):
        w = build_weights(stats, c1, c2, tau)
        spec = replace(config.penalty, weights=w,
                       use_trace=config.penalty.use_trace and tau > 0)
        sub = replace(config, penalty=spec, init=None)
        if spec.use_trace and spec.use_l1_A:
            return fit_prisma(smooth_fn, w, spec, *init, sub)

        def pen(mu, A):
            return pen_value(mu, A, spec)

        if spec.use_trace:
            def prox(v_mu, v_A, step):
                return (prox_l1_nonneg(v_mu, w.w, step),
                        prox_trace(v_A, step * w.tau))
        else:
            def prox(v_mu, v_A, step):
                return (prox_l1_nonneg(v_mu, w.w, step),
                        prox_l1_nonneg(v_A, w.W, step))
        return fit_fista(smooth_fn, prox, pen, *init, sub)

    scores = []
    best_combo, best_score = None, -np.inf
    for c1, c2, tau in itertools.product(c1_grid, c2_grid, tau_grid):
        res = fit_with(train_stats, smooth, c1, c2, tau, (mu0, A0))
        score = heldout_loglik(res.mu, res.A, test, alpha)
        scores.append((c1, c2, tau, score))
        if score > best_score:  # strict: first grid point wins ties
            best_combo, best_score = (c1, c2, tau), score

    full_stats = compute_stats(data, alpha)
    full_smooth = _make_loss_oracle(data, alpha, config.loss_kind)
    init_full = _default_init(data, config.loss_kind)
    final = fit_with(full_stats, full_smooth, *best_combo, init_full)
    return CVResult(best=best_combo, scores=scores, fit=final)
