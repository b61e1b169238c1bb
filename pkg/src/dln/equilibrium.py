"""Equilibrium of the free energy and linearized convergence rates.

The unique equilibrium is isotropic, sigma_1 = ... = sigma_d = sigma_star,
with sigma_star the single crossing of the strictly increasing energy side
L(s) = g'(d f(s)) f'(s) and the strictly decreasing entropy side
R(s) = (d-1)(1 - 1/N) / (2 beta s); infinite depth drops the (1 - 1/N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .depth import Depth
from .energies import SpectralEnergy, energy_hessian_at_equal
from .entropy import kernel_limits_at
from .errors import DegenerateWidth, DomainViolation, NoBracket


@dataclass(frozen=True)
class EquilibriumReport:
    sigma_star: float
    residual: float
    iterations: int


@dataclass(frozen=True)
class RateSpectrum:
    rho_one: float
    rho_perp: float
    multiplicities: tuple[int, int]
    matrix_zero_dim: int | None = None


def depth_factor(depth: Depth) -> float:
    """(1 - 1/N), or its limit 1 at infinite depth."""
    return 1.0 - 1.0 / depth.value if depth.is_finite else 1.0


def metric_prefactor(sigma: float, depth: Depth) -> float:
    """Inverse chamber metric g^ii: N sigma^(2-2/N), or sigma^2 for the
    rescaled infinite-depth metric."""
    if depth.is_finite:
        n = depth.value
        return n * sigma ** (2.0 - 2.0 / n)
    return sigma * sigma


def solve_balance(
    e: SpectralEnergy, beta: float, depth: Depth, d: int, tol: float = 1e-12
) -> EquilibriumReport:
    """Bisection for the balance equation g'(d f(s)) f'(s) = R(s). The
    bracket is grown geometrically from [1e-6, 1e2]; the crossing is unique
    because L is increasing and R is decreasing."""
    if d == 1:
        raise DegenerateWidth("the balance equation degenerates at d = 1")
    if d < 1 or beta <= 0:
        raise DomainViolation("need d >= 2 and beta > 0")

    c = depth_factor(depth) * (d - 1) / (2.0 * beta)

    def diff(s: float) -> float:
        return e.dg(d * e.f(s)) * e.df(s) - c / s

    lo, hi = 1e-6, 1e2
    while diff(lo) > 0:
        lo /= 10.0
        if lo < 1e-12:
            raise NoBracket("no sign change down to 1e-12")
    while diff(hi) < 0:
        hi *= 10.0
        if hi > 1e12:
            raise NoBracket("no sign change up to 1e12")

    iterations = 0
    while hi - lo > 1e-16 * max(hi, 1.0) and iterations < 500:
        mid = 0.5 * (lo + hi)
        if diff(mid) < 0:
            lo = mid
        else:
            hi = mid
        iterations += 1
    sigma_star = 0.5 * (lo + hi)
    lhs = e.dg(d * e.f(sigma_star)) * e.df(sigma_star)
    rhs = c / sigma_star
    residual = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
    if residual > tol:
        raise NoBracket(f"bisection stalled with residual {residual:g}")
    return EquilibriumReport(sigma_star=sigma_star, residual=residual, iterations=iterations)


def schatten_sigma_star(p: float, beta: float, depth: Depth, d: int) -> float:
    """Closed form for the Schatten family: ((d-1)(1-1/N)/(2 beta))^(1/p)."""
    return (depth_factor(depth) * (d - 1) / (2.0 * beta)) ** (1.0 / p)


def entropy_thetas_at_equal(sigma_star: float, depth: Depth, d: int) -> tuple[float, float]:
    """Eigenvalues of the Euclidean entropy Hessian at an equal spectrum:
    theta_1 = (d-1)(q* + p*) on span{1}, theta_perp = (d-1) q* - p*."""
    p_star, q_star = kernel_limits_at(sigma_star, depth)
    return (d - 1) * (q_star + p_star), (d - 1) * q_star - p_star


def chamber_rates(e: SpectralEnergy, beta: float, depth: Depth, d: int) -> RateSpectrum:
    sigma_star = solve_balance(e, beta, depth, d).sigma_star
    _, _, te1, tep = energy_hessian_at_equal(e, sigma_star, d)
    ts1, tsp = entropy_thetas_at_equal(sigma_star, depth, d)
    pref = metric_prefactor(sigma_star, depth)
    return RateSpectrum(
        rho_one=-pref * (te1 - ts1 / beta),
        rho_perp=-pref * (tep - tsp / beta),
        multiplicities=(1, d - 1),
    )


def matrix_rate_spectrum(e: SpectralEnergy, beta: float, depth: Depth, d: int) -> RateSpectrum:
    """Matrix-level linearization at X* = sigma_star Q: eigenvalue 0 on the
    orbit tangent (dim d(d-1)/2), rho_one on span{X*}, rho_perp on traceless
    symmetric directions (dim d(d+1)/2 - 1)."""
    rates = chamber_rates(e, beta, depth, d)
    return RateSpectrum(
        rho_one=rates.rho_one,
        rho_perp=rates.rho_perp,
        multiplicities=(1, d * (d + 1) // 2 - 1),
        matrix_zero_dim=d * (d - 1) // 2,
    )


def dual_solution(p: float, d: int, depth: Depth) -> tuple[float, float]:
    """Maximizer scale and Lagrange multiplier of the constrained problem
    max S_N subject to E_p = 1: sigma_star = (p/d)^(1/p) and
    lambda_star = (1/p) C(d,2) (1 - 1/N)."""
    if p < 1 or d < 2:
        raise DomainViolation("need p >= 1 and d >= 2")
    sigma_star = (p / d) ** (1.0 / p)
    lam = (1.0 / p) * math.comb(d, 2) * depth_factor(depth)
    return sigma_star, lam
