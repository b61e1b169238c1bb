"""Spectral energies E(sigma) = g(sum_i f(sigma_i)) with analytic first and
second derivatives; the Schatten-p family is the canonical instance."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainViolation
from .spectra import as_positive_vector

Scalar = Callable[[float], float]


@dataclass(frozen=True)
class SpectralEnergy:
    """E(sigma) = g(sum f(sigma_i)) with g nondecreasing and f convex.
    Derivatives are supplied analytically; monotonicity/convexity are spot
    checked at every evaluation point (global checks are impossible for
    opaque callables)."""

    f: Scalar
    df: Scalar
    d2f: Scalar
    g: Scalar
    dg: Scalar
    d2g: Scalar
    label: str = "custom"
    schatten_p: float | None = field(default=None)

    def _check(self, sigma: np.ndarray) -> float:
        h = float(sum(self.f(s) for s in sigma))
        if self.dg(h) < 0:
            raise DomainViolation(f"g' < 0 at {h} for energy {self.label}")
        for s in sigma:
            if self.d2f(float(s)) < 0:
                raise DomainViolation(f"f'' < 0 at {s} for energy {self.label}")
        return h


def schatten(p: float) -> SpectralEnergy:
    """E_p(sigma) = (1/p) sum sigma_i^p, i.e. g(s) = s and f(s) = s^p / p."""
    if p < 1:
        raise DomainViolation("Schatten exponent must satisfy p >= 1")
    return SpectralEnergy(
        f=lambda s: s**p / p,
        df=lambda s: s ** (p - 1),
        d2f=lambda s: (p - 1) * s ** (p - 2),
        g=lambda s: s,
        dg=lambda s: 1.0,
        d2g=lambda s: 0.0,
        label=f"schatten:p={p:g}",
        schatten_p=p,
    )


def energy_from_label(label: str) -> SpectralEnergy:
    """Registry lookup; currently only 'schatten:p=<value>'."""
    if label.startswith("schatten:p="):
        return schatten(float(label.split("=", 1)[1]))
    raise DomainViolation(f"unknown energy label {label!r}")


def energy_value(e: SpectralEnergy, sigma) -> float:
    sigma = as_positive_vector(sigma)
    h = e._check(sigma)
    return float(e.g(h))


def energy_grad(e: SpectralEnergy, sigma) -> np.ndarray:
    sigma = as_positive_vector(sigma)
    h = e._check(sigma)
    gp = e.dg(h)
    return np.array([gp * e.df(float(s)) for s in sigma])


def energy_hessian_at_equal(
    e: SpectralEnergy, sigma_star: float, d: int
) -> tuple[float, float, float, float]:
    """At an equal spectrum the Hessian has constant diagonal h1 and constant
    off-diagonal h2; returns (h1, h2, theta_one, theta_perp) where theta_one
    is the eigenvalue on span{1} and theta_perp the one on its complement."""
    if sigma_star <= 0:
        raise DomainViolation("sigma_star must be positive")
    sigma = np.full(d, float(sigma_star))
    h = e._check(sigma)
    fp = e.df(float(sigma_star))
    h2 = e.d2g(h) * fp * fp
    h1 = h2 + e.dg(h) * e.d2f(float(sigma_star))
    return h1, h2, h1 + (d - 1) * h2, h1 - h2
