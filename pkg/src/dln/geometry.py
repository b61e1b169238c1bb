"""The DLN metric g^N through the operator A_{N,X}, the pushforward chamber
metric, the Riemannian Hessian correction, and a numerical check of the
submersion isometry.

A_{N,X} acts diagonally in the SVD frame of X with eigenvalues
(sigma_k^2 - sigma_l^2)/(sigma_k^(2/N) - sigma_l^(2/N)) off the diagonal and
N sigma_k^(2-2/N) on it. Both are the single polynomial phi evaluated at
lambda = sigma^(1/N), so A and its inverse need no coincidence branch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .depth import Depth
from .entropy import phi
from .errors import DegenerateSpectrum, RankDeficient
from .spectra import RANK_FLOOR, SvdTriple, as_matrix, as_positive_vector, svd


@dataclass(frozen=True)
class ChamberMetric:
    depth: Depth
    sigma: np.ndarray
    diag: np.ndarray  # g_ii > 0


def _full_rank_svd(x) -> SvdTriple:
    t = svd(x)
    if t.sigma[-1] < RANK_FLOOR * t.sigma[0]:
        raise RankDeficient("operator A_{N,X} needs full-rank x")
    return t


def _eigenvalues_A(sigma: np.ndarray, n: int) -> np.ndarray:
    """Matrix of eigenvalues of A on the frame elements u_k v_l^T."""
    lam = sigma ** (1.0 / n)
    d = sigma.shape[0]
    eig = np.empty((d, d))
    for k in range(d):
        for l in range(d):
            eig[k, l] = phi(lam[k], lam[l], Depth(n))
    return eig


def apply_A(x, p, depth: Depth) -> np.ndarray:
    """A_{N,X}(P) = sum_k (XX^T)^((N-k)/N) P (X^T X)^((k-1)/N), computed in
    the SVD frame of x."""
    t = _full_rank_svd(x)
    p = as_matrix(p)
    coeff = t.u.T @ p @ t.v
    return t.u @ (coeff * _eigenvalues_A(t.sigma, depth.value)) @ t.v.T


def apply_A_inverse(x, z, depth: Depth) -> np.ndarray:
    t = _full_rank_svd(x)
    z = as_matrix(z)
    coeff = t.u.T @ z @ t.v
    return t.u @ (coeff / _eigenvalues_A(t.sigma, depth.value)) @ t.v.T


def gN_norm_sq(x, z, depth: Depth) -> float:
    """||z||^2 in the metric g^N at x: trace(z^T A^{-1} z)."""
    z = np.asarray(z, dtype=float)
    return float(np.trace(z.T @ apply_A_inverse(x, z, depth)))


def chamber_metric(sigma, depth: Depth) -> ChamberMetric:
    """Diagonal pushforward metric: g_ii = (1/N) sigma_i^(2/N-2) at finite
    depth, sigma_i^(-2) in the rescaled infinite-depth limit."""
    sigma = as_positive_vector(sigma)
    if depth.is_finite:
        n = depth.value
        diag = sigma ** (2.0 / n - 2.0) / n
    else:
        diag = sigma**-2.0
    return ChamberMetric(depth=depth, sigma=sigma, diag=diag)


def riemannian_hessian(sigma, grad, hess, depth: Depth) -> np.ndarray:
    """Hessian w.r.t. g^N_sigma from Euclidean data: adds the Christoffel
    correction ((N-1)/N) grad_i / sigma_i on the diagonal (factor 1 in the
    infinite-depth limit)."""
    sigma = as_positive_vector(sigma)
    grad = np.asarray(grad, dtype=float)
    hess = np.asarray(hess, dtype=float)
    factor = (depth.value - 1.0) / depth.value if depth.is_finite else 1.0
    return hess + np.diag(factor * grad / sigma)


def submersion_residual(x, depth: Depth, trials: int, seed: int = 0) -> float:
    """Max relative mismatch, over random chamber tangents, between the g^N
    norm of the horizontal lift U diag(sigma_dot) V^T and the chamber-metric
    norm of sigma_dot. Small values certify the submersion isometry."""
    t = _full_rank_svd(x)
    sigma = t.sigma
    gaps = -np.diff(sigma) / sigma[0]
    if np.any(gaps < 1e-3):
        raise DegenerateSpectrum("submersion check needs relative gaps > 1e-3")
    g = chamber_metric(sigma, depth).diag
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        sdot = rng.standard_normal(sigma.shape[0])
        while not np.any(sdot):
            sdot = rng.standard_normal(sigma.shape[0])
        lift = t.u @ np.diag(sdot) @ t.v.T
        lhs = gN_norm_sq(x, lift, depth)
        rhs = float(np.sum(g * sdot**2))
        worst = max(worst, abs(lhs - rhs) / rhs)
    return worst
