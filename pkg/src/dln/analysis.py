"""Concavity and indefiniteness audits of the entropy Hessian: pairwise
2x2 blocks, the block determinant, eigenvalue classification in the Euclidean
and Riemannian geometries, and the mean-field kernel."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .depth import Depth
from .entropy import entropy_grad, entropy_hessian, kernel_limits_at, pair_kernels
from .errors import DlnError, NonPositive, OutOfDomain
from .geometry import riemannian_hessian
from .spectra import as_positive_vector

ZERO_EIGENVALUE_RTOL = 1e-10


@dataclass(frozen=True)
class DefinitenessReport:
    classification: str  # NegativeDefinite | NegativeSemidefinite | Indefinite
    n_pos: int
    n_neg: int
    n_zero: int
    rank: int
    eigenvalues: np.ndarray
    tolerance: float


def classify_symmetric(matrix, tolerance: float = ZERO_EIGENVALUE_RTOL) -> DefinitenessReport:
    matrix = np.asarray(matrix, dtype=float)
    eigs = np.linalg.eigvalsh(0.5 * (matrix + matrix.T))
    floor = tolerance * max(float(np.max(np.abs(eigs))), 1e-300)
    n_pos = int(np.sum(eigs > floor))
    n_neg = int(np.sum(eigs < -floor))
    n_zero = eigs.shape[0] - n_pos - n_neg
    if n_pos == 0 and n_zero == 0:
        kind = "NegativeDefinite"
    elif n_pos == 0:
        kind = "NegativeSemidefinite"
    else:
        kind = "Indefinite"
    return DefinitenessReport(
        classification=kind,
        n_pos=n_pos,
        n_neg=n_neg,
        n_zero=n_zero,
        rank=n_pos + n_neg,
        eigenvalues=eigs,
        tolerance=tolerance,
    )


def hessian_block(sigma_i: float, sigma_j: float, depth: Depth) -> np.ndarray:
    """The 2x2 pair block [[q(i,j), p], [p, q(j,i)]] of the entropy Hessian."""
    if sigma_i <= 0 or sigma_j <= 0:
        raise NonPositive("block needs positive singular values")
    kij = pair_kernels(sigma_i, sigma_j, depth)
    kji = pair_kernels(sigma_j, sigma_i, depth)
    return np.array([[kij.q, kij.p], [kij.p, kji.q]])


def delta(r: float, depth: Depth) -> float:
    """Determinant of the unit-scale pair block at (r, 1):
    Delta_N(r) = q(r,1) q(1,r) - p(r,1)^2, with
    Delta_N(1) = (N-2)(N-1)^2 / (12 N^3) in the coincidence limit."""
    if r <= 0:
        raise OutOfDomain("ratio r must be positive")
    block = hessian_block(r, 1.0, depth)
    return float(block[0, 0] * block[1, 1] - block[0, 1] ** 2)


def euclidean_definiteness(sigma, depth: Depth) -> DefinitenessReport:
    sigma = as_positive_vector(sigma)
    return classify_symmetric(entropy_hessian(sigma, depth))


def riemannian_definiteness_at_equal(
    sigma_star: float, d: int, depth: Depth
) -> tuple[float, float, DefinitenessReport]:
    """Eigenvalues of the g^N Hessian of the entropy at an equal spectrum:
    theta_one = -(d-1)(N-1)/(2 sigma^2 N^2) on span{1} and
    theta_perp = (d/6 - (d-1)/(2N) + (2d-3)/(6N^2)) / sigma^2 on its
    complement. The report is computed from the assembled Hessian as an
    independent cross-check."""
    if sigma_star <= 0 or d < 2:
        raise NonPositive("need sigma_star > 0 and d >= 2")
    if not depth.is_finite:
        raise DlnError("closed-form eigenvalues stated for finite depth")
    n = depth.value
    s2 = sigma_star * sigma_star
    theta_one = -(d - 1) * (n - 1) / (2.0 * s2 * n * n)
    theta_perp = (d / 6.0 - (d - 1) / (2.0 * n) + (2 * d - 3) / (6.0 * n * n)) / s2
    sigma = np.full(d, float(sigma_star))
    hess = riemannian_hessian(
        sigma, entropy_grad(sigma, depth), entropy_hessian(sigma, depth), depth
    )
    return theta_one, theta_perp, classify_symmetric(hess)


def riemannian_entropy_hessian_at_equal(sigma_star: float, d: int, depth: Depth) -> np.ndarray:
    """Assembled g^N Hessian of the entropy at an equal spectrum: constant
    diagonal (d-1)(q* + chi) and off-diagonal p*."""
    p_star, q_star = kernel_limits_at(sigma_star, depth)
    n = depth.value
    chi = (n - 1.0) ** 2 / (2.0 * n * n * sigma_star**2)
    return np.full((d, d), p_star) + np.eye(d) * ((d - 1) * (q_star + chi) - p_star)


def meanfield_kernel(x: float, y: float, depth: Depth) -> float:
    """K_N(x, y) = x/(x^2-y^2) - x^(2/N-1)/(N(x^(2/N)-y^(2/N))), the same
    expression as the gradient summand r_N, including its diagonal limit."""
    return pair_kernels(x, y, depth).r
