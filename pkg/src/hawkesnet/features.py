"""Observable excitation statistics and data-driven penalty weights.

All statistics are built from the matrix-valued process

    H[j, k](t) = sum_{t_{k,i} < t} exp(-alpha[j, k] * (t - t_{k,i})),

which is left-continuous (events at exactly t excluded) and decays between
events.  One sweep over the merged event stream maintains H by the usual
exponential recursion, so everything costs O(total events * d^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

#: multiplicative constants of the theoretical weight formulas
W_MU_SQRT = 6 * math.sqrt(2)
W_MU_LIN = 27.93
W_A_SQRT = 4 * math.sqrt(2)
W_A_LIN = 18.62
TAU_SQRT = 8.0
TAU_LIN_A = 10.34
TAU_LIN_B = 2.65


@dataclass(frozen=True)
class FeatureStats:
    """Sweep outputs over a window [0, T].

    H_at_events[j] is an (n_j, d) array of left-limits H[j, :](t-) at the
    events of node j.  B holds running suprema of H, Vhat / Vhat1 / Vhat2
    the optional-variation estimates, sup_H_2inf the supremum over time of
    the max row 2-norm of H.
    """

    horizon_T: float
    H_at_events: tuple
    B: np.ndarray
    Vhat: np.ndarray
    Vhat1: np.ndarray
    Vhat2: np.ndarray
    sup_H_2inf: float
    node_counts: np.ndarray

    @property
    def d(self) -> int:
        return self.B.shape[0]


@dataclass(frozen=True)
class PenaltyWeights:
    """Per-coordinate l1 weights and the trace-norm coefficient."""

    w: np.ndarray
    W: np.ndarray
    tau: float
    x: float
    mode: str  # "theoretical" | "practical"
    c1: Optional[float] = None
    c2: Optional[float] = None


def compute_stats(data, alpha) -> FeatureStats:
    """Single-sweep computation of H left-limits, B, Vhat, Vhat1, Vhat2."""
    alpha = np.asarray(alpha, dtype=float)
    d, T = data.d, data.horizon_T
    times, nodes = data.merged()

    G = np.zeros((d, d))
    B = np.zeros((d, d))
    Vhat = np.zeros((d, d))
    Vhat1 = np.zeros(d)
    Vhat2 = np.zeros((d, d))
    sup_h2inf = 0.0
    H_lists = [[] for _ in range(d)]
    t_prev = 0.0
    for t, l in zip(times, nodes):
        if t > t_prev:
            G *= np.exp(-alpha * (t - t_prev))
        row = G[l].copy()
        H_lists[l].append(row)
        Vhat[l] += row * row
        row_sq = np.einsum("jk,jk->j", G, G)
        h2inf_sq = float(row_sq.max())
        Vhat1[l] += h2inf_sq
        denom = row_sq[l]
        if denom > 0:
            col = G[:, l]
            Vhat2 += (h2inf_sq / denom) * np.outer(col, col)
        G[:, l] += 1.0
        np.maximum(B[:, l], G[:, l], out=B[:, l])
        post_sq = float(np.einsum("jk,jk->j", G, G).max())
        if post_sq > sup_h2inf:
            sup_h2inf = post_sq
        t_prev = t

    H_at_events = tuple(
        np.array(H_lists[j]).reshape(len(H_lists[j]), d) for j in range(d)
    )
    return FeatureStats(
        horizon_T=T,
        H_at_events=H_at_events,
        B=B,
        Vhat=Vhat / T,
        Vhat1=Vhat1 / T,
        Vhat2=Vhat2 / T,
        sup_H_2inf=math.sqrt(sup_h2inf),
        node_counts=data.counts,
    )


def _loglog(arg: float) -> float:
    return 2.0 * math.log(math.log(max(arg, math.e)))


def iterated_log_mu(counts, x: float) -> np.ndarray:
    """Technical iterated-logarithm terms for the baseline weights."""
    counts = np.asarray(counts, dtype=float)
    return np.array([_loglog((6 * n + 56 * x) / (112 * x)) for n in counts])


def iterated_log_A(Vhat, B, x: float, T: float) -> np.ndarray:
    """Technical iterated-logarithm terms for the matrix weights.

    Defined as 0 when B[j, k] = 0 (never-excited pair); the corresponding
    weight vanishes anyway because Vhat[j, k] = 0 as well.
    """
    out = np.zeros_like(np.asarray(B, dtype=float))
    nz = B > 0
    arg = (6 * T * Vhat[nz] + 56 * x * B[nz] ** 2) / (112 * x * B[nz] ** 2)
    out[nz] = 2.0 * np.log(np.log(np.maximum(arg, math.e)))
    return out


def opnorm_V1(stats: FeatureStats) -> float:
    """Operator norm of the diagonal matrix Vhat1."""
    return float(stats.Vhat1.max()) if stats.Vhat1.size else 0.0


def opnorm_V2(stats: FeatureStats) -> float:
    # Vhat2 is symmetric PSD by construction (sum of scaled outer products)
    return float(np.linalg.norm(stats.Vhat2, 2))


def iterated_log_opnorm(stats: FeatureStats, x: float) -> float:
    """Technical iterated-logarithm term entering the trace-norm coefficient."""
    s2 = stats.sup_H_2inf ** 2
    bump = 2 * (4 + s2 / 3) * x
    return (
        _loglog((2 * opnorm_V1(stats) + bump) / x)
        + _loglog((2 * opnorm_V2(stats) + bump) / x)
        + _loglog(s2)
    )


def theoretical_weights(stats: FeatureStats, x: float) -> PenaltyWeights:
    """Fully data-driven weights at confidence level x (natural logs)."""
    if x <= 0:
        raise ValueError("x must be positive")
    T = stats.horizon_T
    if T <= 0:
        raise ValueError("T must be positive")
    d = stats.d
    log_d = math.log(d)

    ell_j = iterated_log_mu(stats.node_counts, x)
    lev_mu = x + log_d + ell_j
    w = W_MU_SQRT * np.sqrt(lev_mu * (stats.node_counts / T) / T) + W_MU_LIN * lev_mu / T

    L_jk = iterated_log_A(stats.Vhat, stats.B, x, T)
    lev_A = x + 2 * log_d + L_jk
    W = W_A_SQRT * np.sqrt(lev_A * stats.Vhat / T) + W_A_LIN * lev_A * stats.B / T

    ell = iterated_log_opnorm(stats, x)
    vmax = max(opnorm_V1(stats), opnorm_V2(stats))
    lev = x + log_d + ell
    tau = TAU_SQRT * math.sqrt(lev * vmax / T) + 2 * lev * (
        TAU_LIN_A + TAU_LIN_B * stats.sup_H_2inf
    ) / T

    return PenaltyWeights(w=w, W=W, tau=tau, x=x, mode="theoretical")


def practical_weights(stats: FeatureStats, c1: float, c2: float,
                      tau: float = 0.0) -> PenaltyWeights:
    """Simplified weights with negligible terms dropped and x = log T.

    The trace-norm coefficient is not data-driven in this mode; callers
    typically cross-validate it and pass the chosen value here.
    """
    if c1 <= 0 or c2 <= 0:
        raise ValueError("c1 and c2 must be positive")
    T = stats.horizon_T
    if T <= 1:
        raise ValueError("practical weights need T > 1 so log T > 0")
    lev = math.log(T) + math.log(stats.d)
    w = c1 * np.sqrt(lev * (stats.node_counts / T) / T)
    W = c2 * np.sqrt(lev * stats.Vhat / T)
    return PenaltyWeights(w=w, W=W, tau=tau, x=math.log(T), mode="practical",
                          c1=c1, c2=c2)


def constant_weights(d: int, c1: float, c2: float, tau: float = 0.0,
                     x: float = 0.0) -> PenaltyWeights:
    """Non-weighted l1 penalties: a single constant per block."""
    return PenaltyWeights(w=np.full(d, c1), W=np.full((d, d), c2), tau=tau,
                          x=x, mode="constant", c1=c1, c2=c2)
