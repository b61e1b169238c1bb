"""Boltzmann entropy of the deep linear network on the chamber of ordered
singular values, its infinite-depth limit, gradients, Euclidean Hessians, and
the pairwise kernels p, q, r with their coincidence limits.

Finite-depth values route through lambda = sigma^(1/N) and the polynomial

    phi(a, b) = sum_{m=0}^{N-1} a^(2(N-1-m)) b^(2m)
              = (a^2N - b^2N) / (a^2 - b^2),

which has no singularity at a = b (phi(a, a) = N a^(2N-2)), so the entropy
itself never needs a branch switch. The finite-depth kernels are evaluated
through similar cancellation-free power-sum ratios and are exact on the
diagonal too. Only the infinite-depth log kernels keep branches: a series in
w = 1 - (b/a)^2 replaces the raw formulas near the diagonal, and the entropy
pair sum substitutes its analytic limit below COINCIDENCE_RTOL.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .depth import Depth
from .errors import NonPositive
from .spectra import as_positive_vector

# Relative gap |a-b|/max(a,b) below which kernel limits replace the direct
# formulas. At 1e-5 both branches agree to ~1e-8 in double precision.
COINCIDENCE_RTOL = 1e-5


@dataclass(frozen=True)
class EntropyValue:
    value: float  # pair sum plus constant_offset; the (N-1)c_d term is never computed
    constant_offset: float = 0.0


@dataclass(frozen=True)
class PairKernels:
    p: float
    q: float
    r: float


def phi(a: float, b: float, depth: Depth) -> float:
    """The pair polynomial sum_{m=0}^{N-1} a^(2(N-1-m)) b^(2m); strictly
    positive for a, b > 0 and equal to N a^(2N-2) on the diagonal."""
    if a <= 0 or b <= 0:
        raise NonPositive("phi requires positive arguments")
    n = depth.value
    a2, b2 = a * a, b * b
    total = 0.0
    term = a2 ** (n - 1)
    ratio = b2 / a2
    for _ in range(n):
        total += term
        term *= ratio
    return total


def _coincident(a: float, b: float) -> bool:
    return abs(a - b) <= COINCIDENCE_RTOL * max(a, b)


# Series of the infinite-depth kernels in w = 1 - (b/a)^2, used on |w| <= 0.1
# where the raw formulas lose digits to cancellation:
#   r = Gr(w)/a, p = Gp(w)/a^2, q = Gq(w)/a^2.
_GR = (1 / 2, 1 / 12, 1 / 24, 19 / 720, 3 / 160, 863 / 60480, 275 / 24192,
       33953 / 3628800, 8183 / 1036800, 3250433 / 479001600, 4671 / 788480)
_GP = (-1 / 6, -1 / 12, -13 / 240, -19 / 480, -7493 / 241920, -2453 / 96768,
       -621701 / 29030400, -153641 / 8294400, -23817307 / 1459814400,
       -14187857 / 973209600, -4411885382743 / 334764638208000)
_GQ = (-1 / 3, -1 / 12, -1 / 20, -5 / 144, -197 / 7560, -1243 / 60480,
       -15227 / 907200, -51047 / 3628800, -120031 / 9979200,
       -5005577 / 479001600, -6013950601 / 653837184000)

_INF_SERIES_W = 0.1


def _poly(coeffs, w: float) -> float:
    total = 0.0
    for c in reversed(coeffs):
        total = total * w + c
    return total


def pair_kernels(a: float, b: float, depth: Depth) -> PairKernels:
    """The kernels (p, q, r): p and q are the off-diagonal and diagonal
    Hessian kernels, r the gradient summand. Finite depth is evaluated through
    cancellation-free polynomial forms in (u, v) = (a^(2/N), b^(2/N)):

        P = sum_j u^(N-1-j) v^j,  Q = dP/du,
        r = u Q / (a N P),
        p = 2 u v (Q_v P - Q P_v) / (a b N^2 P^2),
        q = (u Q / (a^2 N P)) [ (2/N)(1 + u Q_u / Q - u Q / P) - 1 ],

    which are exact on the diagonal (no branch switch anywhere). Infinite
    depth switches to a series in w = 1 - (b/a)^2 for |w| <= 0.1."""
    if a <= 0 or b <= 0:
        raise NonPositive("pair_kernels requires positive arguments")
    if depth.is_finite:
        n = depth.value
        u, v = a ** (2.0 / n), b ** (2.0 / n)
        # weighted power sums: s0 = P, s1 = u Q, s2 = v P_v, s3 = u^2 Q_u,
        # s4 = u v Q_v, each a positive-coefficient polynomial in (u, v)
        s0 = s1 = s2 = s3 = s4 = 0.0
        term = u ** (n - 1)
        ratio = v / u
        for j in range(n):
            wq = float(n - 1 - j)
            s0 += term
            s1 += wq * term
            s2 += j * term
            s3 += wq * (wq - 1.0) * term
            s4 += j * wq * term
            term *= ratio
        r = s1 / (a * n * s0)
        p = 2.0 * (s4 * s0 - s1 * s2) / (a * b * n * n * s0 * s0)
        q = (s1 / (a * a * n * s0)) * ((2.0 / n) * (1.0 + s3 / s1 - s1 / s0) - 1.0)
        return PairKernels(p, q, r)
    # infinite depth: log kernels, series branch near the diagonal
    t = (b - a) / a
    w = -t * (2.0 + t)  # 1 - (b/a)^2 without cancellation
    if abs(w) <= _INF_SERIES_W:
        return PairKernels(
            _poly(_GP, w) / (a * a), _poly(_GQ, w) / (a * a), _poly(_GR, w) / a
        )
    ell = math.log(a / b)
    d2 = a * a - b * b
    p = 2.0 * a * b / d2**2 - 1.0 / (2.0 * a * b * ell**2)
    q = -(a * a + b * b) / d2**2 + (ell + 1.0) / (2.0 * a * a * ell**2)
    r = a / d2 - 1.0 / (2.0 * a * ell)
    return PairKernels(p, q, r)


def entropy(sigma, depth: Depth, constant_offset: float = 0.0) -> EntropyValue:
    """Entropy of an ordered spectrum, up to the depth-dependent additive
    constant (exposed only through constant_offset, default 0)."""
    sigma = as_positive_vector(sigma)
    d = sigma.shape[0]
    total = 0.0
    if depth.is_finite:
        lam = sigma ** (1.0 / depth.value)
        for i in range(d):
            for j in range(i + 1, d):
                total += 0.5 * math.log(phi(lam[i], lam[j], depth))
    else:
        for i in range(d):
            for j in range(i + 1, d):
                a, b = sigma[i], sigma[j]
                if _coincident(a, b):
                    # limit of (a^2-b^2)/(log a^2 - log b^2) as b -> a is a^2;
                    # a*b keeps the branch continuous to O(gap^2)
                    total += 0.5 * math.log(a * b)
                else:
                    total += 0.5 * math.log((a * a - b * b) / (2.0 * math.log(a / b)))
    return EntropyValue(value=total + constant_offset, constant_offset=constant_offset)


def entropy_grad(sigma, depth: Depth) -> np.ndarray:
    sigma = as_positive_vector(sigma)
    d = sigma.shape[0]
    grad = np.zeros(d)
    for i in range(d):
        grad[i] = sum(
            pair_kernels(sigma[i], sigma[k], depth).r for k in range(d) if k != i
        )
    return grad


def entropy_hessian(sigma, depth: Depth) -> np.ndarray:
    sigma = as_positive_vector(sigma)
    d = sigma.shape[0]
    hess = np.zeros((d, d))
    for i in range(d):
        for j in range(d):
            if i == j:
                hess[i, i] = sum(
                    pair_kernels(sigma[i], sigma[k], depth).q
                    for k in range(d)
                    if k != i
                )
            else:
                kern = pair_kernels(sigma[i], sigma[j], depth)
                hess[i, j] = kern.p
    # p is symmetric in (a, b) analytically; enforce exact symmetry
    return 0.5 * (hess + hess.T)


def kernel_limits_at(sigma_star: float, depth: Depth) -> tuple[float, float]:
    """(p_star, q_star): the coincidence limits of the Hessian kernels."""
    k = pair_kernels(sigma_star, sigma_star, depth)
    return k.p, k.q
