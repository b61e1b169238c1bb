#!/usr/bin/env python3
"""Compare predicted linearization rates (rho_1 on span{1}, rho_perp on its
complement) against decay rates fitted from trajectories started near the
isotropic equilibrium.

Usage: python scripts/rate_fit.py [N] [p] [beta] [d]
"""

import sys

import numpy as np

from dln import Depth, FlowProblem, chamber_rates, integrate, schatten, solve_balance


def fit_rate(prob, sigma_star, direction, d, tmax=1.5):
    y0 = np.full(d, sigma_star) + 1e-4 * direction
    samples = [float(t) for t in np.linspace(0.2, tmax, 8)]
    traj = integrate(prob, y0, (0.0, tmax), rtol=1e-12, atol=1e-14, sample_times=samples)
    dev = np.linalg.norm(traj.states - sigma_star, axis=1)
    return np.polyfit(traj.times, np.log(dev), 1)[0]


def run(n, p, beta, d):
    depth = Depth.finite(n)
    energy = schatten(p)
    sigma_star = solve_balance(energy, beta, depth, d).sigma_star
    rates = chamber_rates(energy, beta, depth, d)
    prob = FlowProblem(energy=energy, depth=depth, beta=beta, level="chamber")

    rho1_fit = fit_rate(prob, sigma_star, np.ones(d) / np.sqrt(d), d)
    perp = np.zeros(d)
    perp[0], perp[-1] = 1.0, -1.0
    rhop_fit = fit_rate(prob, sigma_star, perp / np.sqrt(2), d)

    print(f"(N, p, beta, d) = ({n}, {p}, {beta}, {d}); sigma* = {sigma_star:.8f}")
    print(f"rho_1:    predicted {rates.rho_one:+.8f}   fitted {rho1_fit:+.8f}")
    print(f"rho_perp: predicted {rates.rho_perp:+.8f}   fitted {rhop_fit:+.8f}")


if __name__ == "__main__":
    args = sys.argv[1:]
    n = int(args[0]) if len(args) > 0 else 3
    p = float(args[1]) if len(args) > 1 else 2.0
    beta = float(args[2]) if len(args) > 2 else 2.0
    d = int(args[3]) if len(args) > 3 else 3
    run(n, p, beta, d)
