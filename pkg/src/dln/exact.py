"""Gauss hypergeometric series and the closed-form time map of the diagonal
scalar flow s' = -s^(nu-1) + s_star^nu / s.

Separating variables gives t - t0 = T(s(t)) - T(s0) with

    T(s) = s^2 / (2 s_star^nu) * 2F1(1, 2/nu; 1 + 2/nu; (s/s_star)^nu),

valid on 0 < s < s_star where the series argument stays below 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NonPositive, OutOfDomain
from .flows import Trajectory

_MAX_TERMS = 100_000


@dataclass(frozen=True)
class QuadratureParams:
    nu: float  # = N * p
    s_star: float

    def __post_init__(self):
        if self.nu < 2:
            raise NonPositive("nu must be >= 2")
        if self.s_star <= 0:
            raise NonPositive("s_star must be positive")


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """Power series sum_k (a)_k (b)_k / ((c)_k k!) z^k for |z| < 1,
    truncated at a machine-relative 1e-16 term. For z in [0.9, 1) the Euler
    transformation (1-z)^(c-a-b) 2F1(c-a, c-b; c; z) is applied first."""
    if c <= 0 and c == int(c):
        raise OutOfDomain("c must not be a nonpositive integer")
    if abs(z) >= 1.0:
        raise OutOfDomain(f"series restricted to |z| < 1, got z={z}")
    prefactor = 1.0
    if 0.9 <= z < 1.0:
        prefactor = (1.0 - z) ** (c - a - b)
        a, b = c - a, c - b
    total = 1.0
    term = 1.0
    for k in range(_MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        total += term
        if abs(term) <= 1e-16 * abs(total):
            return prefactor * total
    raise NoConvergence(f"2F1 series did not converge at z={z}")


def time_map(s: float, params: QuadratureParams) -> float:
    """T(s) for 0 < s < s_star."""
    if s <= 0:
        raise NonPositive("s must be positive")
    if s >= params.s_star:
        raise OutOfDomain("time map defined for s < s_star only")
    nu = params.nu
    z = (s / params.s_star) ** nu
    return (
        s * s
        / (2.0 * params.s_star**nu)
        * hyp2f1(1.0, 2.0 / nu, 1.0 + 2.0 / nu, z)
    )


def quadrature_residual(traj: Trajectory, params: QuadratureParams) -> float:
    """Max over sample pairs (t0, t) of |(t - t0) - (T(s(t)) - T(s(t0)))|:
    an independent check of the integrator against the special function."""
    if traj.level != "scalar":
        raise OutOfDomain("expected a scalar-level trajectory")
    s = traj.states[:, 0]
    if np.any(s >= params.s_star) or np.any(s <= 0):
        raise OutOfDomain("all samples must lie strictly inside (0, s_star)")
    tmap = np.array([time_map(float(v), params) for v in s])
    t = traj.times
    # residual of every pair reduces to the worst deviation of t - T(s)
    offset = t - tmap
    return float(np.max(offset) - np.min(offset))
