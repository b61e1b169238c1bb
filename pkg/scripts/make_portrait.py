#!/usr/bin/env python3
"""Produce the d=2 phase-portrait grid and a bundle of trajectories for the
the reference parameters (N, p, beta) = (10, 2, 5), all as CSV.

Usage: python scripts/make_portrait.py [outdir]
"""

import pathlib
import sys

import numpy as np

from dln import Depth, FlowProblem, integrate, schatten, solve_balance
from dln.cli import main as dln_main


def run(outdir: pathlib.Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    depth, beta, d = Depth.finite(10), 5.0, 2
    energy = schatten(2.0)
    sigma_star = solve_balance(energy, beta, depth, d).sigma_star

    grid_path = outdir / "portrait_grid.csv"
    dln_main([
        "portrait", "--d", "2", "--N", "10", "--beta", "5",
        "--energy", "schatten:p=2", "--grid", "40",
        "--sigma-max", f"{2 * sigma_star:.17g}", "--out", str(grid_path),
    ])

    prob = FlowProblem(energy=energy, depth=depth, beta=beta, level="chamber")
    starts = [(0.6, 0.1), (0.55, 0.3), (0.5, 0.45), (0.2, 0.05), (0.1, 0.08)]
    for i, y0 in enumerate(starts):
        traj = integrate(prob, np.array(y0), (0.0, 100.0), rtol=1e-10, atol=1e-12)
        traj.to_csv(outdir / f"trajectory_{i}.csv")
    print(f"wrote {grid_path} and {len(starts)} trajectories; sigma* = {sigma_star:.6f}")


if __name__ == "__main__":
    run(pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "portrait_out"))
