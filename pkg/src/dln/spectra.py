"""Square matrices, deterministic SVD, ordered spectra, and the minimizer orbit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFinite, NonPositive, NotOrthogonal, RankDeficient

RANK_FLOOR = 1e-14  # sigma_min < RANK_FLOOR * sigma_max counts as rank deficient


@dataclass(frozen=True)
class SvdTriple:
    u: np.ndarray
    sigma: np.ndarray  # nonincreasing, positive for full-rank input
    v: np.ndarray

    @property
    def dim(self) -> int:
        return self.sigma.shape[0]

    def recompose(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.v.T


def as_matrix(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] != x.shape[1] or x.shape[0] < 1:
        raise NonFinite(f"expected a square matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFinite("matrix has non-finite entries")
    return x


def as_positive_vector(values) -> np.ndarray:
    """Finite, strictly positive 1-d vector. The entropy/energy formulas are
    permutation symmetric, so they accept unordered spectra (e.g. finite
    difference probes that momentarily break the chamber ordering)."""
    sigma = np.asarray(values, dtype=float)
    if sigma.ndim != 1 or sigma.size < 1:
        raise NonPositive(f"expected a 1-d spectrum, got shape {sigma.shape}")
    if not np.all(np.isfinite(sigma)) or np.any(sigma <= 0):
        raise NonPositive("singular values must be finite and positive")
    return sigma


def as_spectrum(values) -> np.ndarray:
    """Validate an ordered positive spectrum sigma_1 >= ... >= sigma_d > 0."""
    sigma = as_positive_vector(values)
    if np.any(np.diff(sigma) > 0):
        raise NonPositive("singular values must be nonincreasing")
    return sigma


def svd(x) -> SvdTriple:
    """SVD with a fixed sign convention: in each left singular vector the
    entry of largest magnitude is made nonnegative, so U and V are
    reproducible (they are otherwise only defined up to paired signs)."""
    x = as_matrix(x)
    u, s, vt = np.linalg.svd(x)
    v = vt.T
    for k in range(s.shape[0]):
        j = int(np.argmax(np.abs(u[:, k])))
        if u[j, k] < 0:
            u[:, k] = -u[:, k]
            v[:, k] = -v[:, k]
    return SvdTriple(u=u, sigma=s, v=v)


def orbit_point(q, sigma_star: float) -> np.ndarray:
    """The point sigma_star * Q of the minimizer orbit, Q orthogonal."""
    q = as_matrix(q)
    d = q.shape[0]
    if np.max(np.abs(q.T @ q - np.eye(d))) > 1e-10:
        raise NotOrthogonal("q is not orthogonal to 1e-10")
    if sigma_star <= 0:
        raise NonPositive("sigma_star must be positive")
    return sigma_star * q


def orbit_distance(x, sigma_star: float) -> float:
    """Frobenius distance from x to the orbit {sigma_star * Q}: the nearest
    orbit point is sigma_star * U V^T, so the distance is
    sqrt(sum_i (sigma_i - sigma_star)^2)."""
    if sigma_star <= 0:
        raise NonPositive("sigma_star must be positive")
    t = svd(x)
    if t.sigma[-1] < RANK_FLOOR * t.sigma[0]:
        raise RankDeficient("matrix is numerically rank deficient")
    return float(np.sqrt(np.sum((t.sigma - sigma_star) ** 2)))
