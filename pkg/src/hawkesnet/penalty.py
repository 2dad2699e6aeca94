"""Penalty values and proximal operators (weighted l1 + nonneg, trace norm)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import PenaltyWeights

#: singular values below RANK_TOL * sigma_max count as zero for rank reports
RANK_TOL = 1e-12


@dataclass(frozen=True)
class PenaltySpec:
    weights: PenaltyWeights
    use_l1_mu: bool = True
    use_l1_A: bool = True
    use_trace: bool = False


def trace_norm(A) -> float:
    return float(np.linalg.svd(np.asarray(A, dtype=float), compute_uv=False).sum())


def pen_value(mu, A, spec: PenaltySpec) -> float:
    """Total penalty over the enabled terms (entries assumed nonnegative)."""
    mu = np.asarray(mu, dtype=float)
    A = np.asarray(A, dtype=float)
    total = 0.0
    if spec.use_l1_mu:
        total += float(np.sum(spec.weights.w * np.abs(mu)))
    if spec.use_l1_A:
        total += float(np.sum(spec.weights.W * np.abs(A)))
    if spec.use_trace and spec.weights.tau > 0:
        total += spec.weights.tau * trace_norm(A)
    return total


def prox_l1_nonneg(v, weights, step: float):
    """Exact prox of step * <weights, |.|> plus the nonnegativity indicator."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(weights, dtype=float)
    if w.shape != v.shape:
        raise ValueError("weights shape must match input shape")
    if step <= 0:
        raise ValueError("step must be positive")
    return np.maximum(v - step * w, 0.0)


def prox_trace(V, tau_step: float):
    """Singular value soft-thresholding: prox of tau_step * trace norm.

    Output entries may be negative; the joint prox with the nonnegativity
    constraint has no closed form and is handled by solver-level splitting.
    """
    V = np.asarray(V, dtype=float)
    if not np.all(np.isfinite(V)):
        raise ValueError("non-finite input to prox_trace")
    if tau_step < 0:
        raise ValueError("tau_step must be nonnegative")
    if tau_step == 0:
        return V.copy()
    U, s, Vt = np.linalg.svd(V, full_matrices=False)
    s_thr = np.maximum(s - tau_step, 0.0)
    return (U * s_thr) @ Vt


def numerical_rank(A) -> int:
    s = np.linalg.svd(np.asarray(A, dtype=float), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > RANK_TOL * s[0]))
