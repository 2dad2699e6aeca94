"""Least-squares and negative log-likelihood losses with exact gradients.

Both losses are evaluated from caches that are independent of the
parameters, so solver iterations never touch the raw event stream:

* least squares uses closed-form Gram integrals of the excitation process
  H (pairwise products of decaying exponentials integrate analytically
  between consecutive events);
* the log-likelihood uses the per-event left-limits of H plus the
  integrals of H over the window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LossValueGrad:
    value: float
    grad_mu: np.ndarray
    grad_A: np.ndarray
    feasible: bool = True


@dataclass(frozen=True)
class PrecomputedGram:
    """Normalized integrals entering the least-squares expansion.

    psi[j, k]  = (1/T) int_0^T H[j, k](t) dt
    G[j, k, l] = (1/T) int_0^T H[j, k](t) H[j, l](t) dt
    S[j, k]    = (1/T) sum over events t of node j of H[j, k](t-)
    """

    horizon_T: float
    psi: np.ndarray
    G: np.ndarray
    S: np.ndarray
    counts: np.ndarray

    @property
    def d(self) -> int:
        return self.psi.shape[0]


def precompute_gram(data, alpha) -> PrecomputedGram:
    """Closed-form Gram integrals, exact up to floating point."""
    alpha = np.asarray(alpha, dtype=float)
    d, T = data.d, data.horizon_T
    times, nodes = data.merged()

    uniform = bool(np.ptp(alpha) == 0) if alpha.size else True
    a0 = float(alpha.flat[0]) if alpha.size else 1.0
    if not uniform:
        asum = alpha[:, :, None] + alpha[:, None, :]

    Gst = np.zeros((d, d))
    psi = np.zeros((d, d))
    Gram = np.zeros((d, d, d))
    S = np.zeros((d, d))
    counts = np.zeros(d, dtype=int)
    t_prev = 0.0

    def integrate_segment(dt: float):
        if dt <= 0:
            return
        P = np.einsum("jk,jl->jkl", Gst, Gst)
        if uniform:
            E = np.exp(-a0 * dt)
            psi_coef = (1.0 - E) / a0
            gram_coef = (1.0 - E * E) / (2 * a0)
            psi[...] += Gst * psi_coef
            Gram[...] += P * gram_coef
            Gst[...] *= E
        else:
            E = np.exp(-alpha * dt)
            psi[...] += Gst * (1.0 - E) / alpha
            Gram[...] += P * (1.0 - np.exp(-asum * dt)) / asum
            Gst[...] *= E

    for t, l in zip(times, nodes):
        integrate_segment(t - t_prev)
        S[l] += Gst[l]
        counts[l] += 1
        Gst[:, l] += 1.0
        t_prev = t
    integrate_segment(T - t_prev)

    return PrecomputedGram(horizon_T=T, psi=psi / T, G=Gram / T, S=S / T,
                           counts=counts)


def least_squares(mu, A, gram: PrecomputedGram) -> LossValueGrad:
    """Least-squares empirical risk and gradient from cached Gram integrals."""
    mu = np.asarray(mu, dtype=float)
    A = np.asarray(A, dtype=float)
    if mu.shape[0] != gram.d or A.shape != (gram.d, gram.d):
        raise ValueError("dimension mismatch with precomputed Gram")
    T = gram.horizon_T
    GA = np.einsum("jkl,jl->jk", gram.G, A)
    value = float(
        np.sum(mu * mu)
        + 2 * np.sum(mu * np.einsum("jk,jk->j", A, gram.psi))
        + np.sum(A * GA)
        - 2 * np.sum(mu * gram.counts) / T
        - 2 * np.sum(A * gram.S)
    )
    grad_mu = 2 * (mu + np.einsum("jk,jk->j", A, gram.psi)) - 2 * gram.counts / T
    grad_A = 2 * (mu[:, None] * gram.psi + GA) - 2 * gram.S
    return LossValueGrad(value=value, grad_mu=grad_mu, grad_A=grad_A)


@dataclass(frozen=True)
class LogLikCache:
    """Parameter-independent pieces of the log-likelihood.

    H_at_events[j] is the (n_j, d) array of H left-limits at the events of
    node j; int_H[j, k] = int_0^T H[j, k](t) dt.
    """

    horizon_T: float
    H_at_events: tuple
    int_H: np.ndarray
    counts: np.ndarray

    @property
    def d(self) -> int:
        return self.int_H.shape[0]


def build_loglik_cache(data, alpha) -> LogLikCache:
    alpha = np.asarray(alpha, dtype=float)
    d, T = data.d, data.horizon_T
    times, nodes = data.merged()

    Gst = np.zeros((d, d))
    int_H = np.zeros((d, d))
    H_lists = [[] for _ in range(d)]
    t_prev = 0.0

    def integrate_segment(dt: float):
        if dt <= 0:
            return
        E = np.exp(-alpha * dt)
        int_H[...] += Gst * (1.0 - E) / alpha
        Gst[...] *= E

    for t, l in zip(times, nodes):
        integrate_segment(t - t_prev)
        H_lists[l].append(Gst[l].copy())
        Gst[:, l] += 1.0
        t_prev = t
    integrate_segment(T - t_prev)

    H_at_events = tuple(
        np.array(H_lists[j]).reshape(len(H_lists[j]), d) for j in range(d)
    )
    return LogLikCache(horizon_T=T, H_at_events=H_at_events, int_H=int_H,
                       counts=data.counts)


def neg_log_likelihood_cached(mu, A, cache: LogLikCache) -> LossValueGrad:
    """Negative log-likelihood (normalized by 1/T) and gradient.

    Intensities are taken at event left-limits (predictable convention).
    Returns value = +inf with feasible=False when some event has zero
    intensity, so line searches can backtrack instead of crashing.
    """
    mu = np.asarray(mu, dtype=float)
    A = np.asarray(A, dtype=float)
    d, T = cache.d, cache.horizon_T
    if mu.shape[0] != d or A.shape != (d, d):
        raise ValueError("dimension mismatch with log-likelihood cache")
    value = 0.0
    grad_mu = np.zeros(d)
    grad_A = np.zeros((d, d))
    for j in range(d):
        H = cache.H_at_events[j]
        lam = mu[j] + H @ A[j] if H.size else np.empty(0)
        if np.any(lam <= 0):
            return LossValueGrad(value=np.inf, grad_mu=grad_mu, grad_A=grad_A,
                                 feasible=False)
        compensator = mu[j] * T + float(A[j] @ cache.int_H[j])
        value -= float(np.log(lam).sum()) - compensator
        inv = 1.0 / lam if lam.size else lam
        grad_mu[j] = -(float(inv.sum()) - T)
        grad_A[j] = -((H.T @ inv if H.size else 0.0) - cache.int_H[j])
    return LossValueGrad(value=value / T, grad_mu=grad_mu / T, grad_A=grad_A / T)


def neg_log_likelihood(params, data, alpha=None) -> LossValueGrad:
    """Convenience wrapper building the cache from raw events."""
    alpha = params.alpha if alpha is None else alpha
    cache = build_loglik_cache(data, alpha)
    return neg_log_likelihood_cached(params.mu, params.A, cache)
