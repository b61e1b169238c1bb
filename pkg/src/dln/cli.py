"""Command-line front end.

Subcommands: entropy, equilibrium, flow, quadrature, audit, portrait.
Scalar reports go to stdout as JSON (17 significant digits); trajectories and
grids are written as CSV. Exit codes: 0 success, 1 domain error, 2 usage.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import analysis, equilibrium, exact, flows
from .entropy import entropy, entropy_grad, entropy_hessian, pair_kernels
from .depth import Depth
from .energies import energy_from_label
from .errors import DlnError


def _fmt(value) -> str:
    """JSON with floats at 17 significant digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if isinstance(value, str):
        import json

        return json.dumps(value)
    if isinstance(value, dict):
        items = ", ".join(f"{_fmt(str(k))}: {_fmt(v)}" for k, v in value.items())
        return "{" + items + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value)}")


def _report(command: str, inputs: dict, results: dict, **extra) -> None:
    doc = {"command": command, "inputs": inputs, "results": results}
    doc.update(extra)
    sys.stdout.write(_fmt(doc) + "\n")


def _csv_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _threads() -> int:
    return max(1, int(os.environ.get("DLN_THREADS", os.cpu_count() or 1)))


def cmd_entropy(args) -> int:
    depth = Depth.parse(args.N)
    sigma = _csv_list(args.sigma)
    val = entropy(sigma, depth, constant_offset=args.offset)
    _report(
        "entropy",
        {"sigma": sigma, "N": str(depth), "offset": args.offset},
        {
            "value": val.value,
            "grad": entropy_grad(sigma, depth),
            "hess": entropy_hessian(sigma, depth),
        },
    )
    return 0


def cmd_equilibrium(args) -> int:
    depth = Depth.parse(args.N)
    e = energy_from_label(args.energy)
    report = equilibrium.solve_balance(e, args.beta, depth, args.d, tol=args.tol)
    rates = equilibrium.chamber_rates(e, args.beta, depth, args.d)
    _report(
        "equilibrium",
        {"energy": args.energy, "N": str(depth), "d": args.d, "beta": args.beta, "tol": args.tol},
        {
            "sigma_star": report.sigma_star,
            "residual": report.residual,
            "rho_one": rates.rho_one,
            "rho_perp": rates.rho_perp,
        },
    )
    return 0


def cmd_flow(args) -> int:
    depth = Depth.parse(args.N)
    e = energy_from_label(args.energy)
    init = np.array(_csv_list(args.init))
    prob = flows.FlowProblem(
        energy=e, depth=depth, beta=args.beta, level=args.level, width=args.d
    )
    traj = flows.integrate(prob, init, (0.0, args.tmax), rtol=args.rtol, atol=args.atol)
    traj.to_csv(args.out)
    _report(
        "flow",
        {
            "level": args.level,
            "N": str(depth),
            "d": args.d,
            "beta": args.beta,
            "energy": args.energy,
            "init": init,
            "tmax": args.tmax,
            "rtol": args.rtol,
            "atol": args.atol,
            "out": args.out,
        },
        {
            "terminal_reason": traj.terminal_reason,
            "t_final": float(traj.times[-1]),
            "state_final": traj.states[-1],
            "samples": int(traj.times.shape[0]),
        },
    )
    return 0


def cmd_quadrature(args) -> int:
    params = exact.QuadratureParams(nu=args.nu, s_star=args.s_star)
    prob = flows.FlowProblem(
        energy=None, depth=Depth.finite(2), beta=1.0, level="scalar",
        nu=args.nu, s_star=args.s_star,
    )
    traj = flows.integrate(prob, [args.s0], (0.0, args.tmax), rtol=1e-10, atol=1e-12)
    residual = exact.quadrature_residual(traj, params)
    _report(
        "quadrature",
        {"nu": args.nu, "s_star": args.s_star, "s0": args.s0, "tmax": args.tmax},
        {"max_residual": residual, "samples": int(traj.times.shape[0])},
    )
    return 0


def _random_spectrum(rng, d: int) -> np.ndarray:
    return np.sort(rng.uniform(0.1, 3.0, size=d))[::-1].copy()


def cmd_audit(args) -> int:
    depth = Depth.finite(args.N)
    rng = np.random.default_rng(args.seed)
    inputs = {"mode": args.mode, "N": args.N, "d": args.d, "samples": args.samples, "seed": args.seed}
    if args.mode == "euclid":
        counts: dict[str, int] = {}
        max_eig = -np.inf
        for _ in range(args.samples):
            rep = analysis.euclidean_definiteness(_random_spectrum(rng, args.d), depth)
            counts[rep.classification] = counts.get(rep.classification, 0) + 1
            max_eig = max(max_eig, float(np.max(rep.eigenvalues)))
        _report("audit", inputs, {"classifications": counts, "max_eigenvalue": max_eig},
                rng="numpy-pcg64")
    elif args.mode == "riemann":
        ok = 0
        for _ in range(args.samples):
            s_star = float(rng.uniform(0.2, 3.0))
            t1, tp, rep = analysis.riemannian_definiteness_at_equal(s_star, args.d, depth)
            if rep.n_neg == 1 and rep.n_pos == args.d - 1 and t1 < 0 < tp:
                ok += 1
        _report("audit", inputs,
                {"indefinite_one_negative": ok, "violations": args.samples - ok},
                rng="numpy-pcg64")
    elif args.mode == "blocks":
        worst = 0.0
        for _ in range(args.samples):
            sigma = _random_spectrum(rng, args.d)
            hess = entropy_hessian(sigma, depth)
            rebuilt = np.zeros_like(hess)
            for i in range(args.d):
                for j in range(i + 1, args.d):
                    block = analysis.hessian_block(sigma[i], sigma[j], depth)
                    rebuilt[np.ix_([i, j], [i, j])] += block
            worst = max(worst, float(np.max(np.abs(rebuilt - hess))))
        ratios = np.sort(rng.uniform(1.0 + 1e-4, 100.0, size=max(args.samples, 8)))
        deltas = np.array([analysis.delta(float(r), depth) for r in ratios])
        _report("audit", inputs, {
            "block_sum_max_error": worst,
            "delta_at_one": analysis.delta(1.0, depth),
            "delta_all_positive": bool(np.all(deltas > 0)) if args.N > 2 else bool(np.all(np.abs(deltas) < 1e-12)),
            "delta_decreasing": bool(np.all(np.diff(deltas) < 0)) if args.N > 2 else True,
        }, rng="numpy-pcg64")
    elif args.mode == "skew":
        worst_skew = -np.inf
        worst_sign = -np.inf
        for _ in range(args.samples):
            b = float(rng.uniform(0.1, 3.0))
            a = b * float(rng.uniform(1.0 + 1e-4, 10.0))
            kab = pair_kernels(a, b, depth)
            kba = pair_kernels(b, a, depth)
            worst_skew = max(worst_skew, kab.r - kba.r)
            worst_sign = max(worst_sign, kab.p, kab.q, kba.q)
        _report("audit", inputs, {
            "max_skew_difference": worst_skew,
            "max_kernel_sign": worst_sign,
            "violations": int(worst_skew > 1e-12) + int(worst_sign >= 0.0),
        }, rng="numpy-pcg64")
    else:
        raise DlnError(f"unknown audit mode {args.mode!r}")
    return 0


def cmd_portrait(args) -> int:
    depth = Depth.parse(args.N)
    e = energy_from_label(args.energy)
    prob = flows.FlowProblem(energy=e, depth=depth, beta=args.beta, level="chamber")
    sigma_max = args.sigma_max
    if sigma_max is None:
        sigma_max = 2.0 * equilibrium.solve_balance(e, args.beta, depth, args.d).sigma_star
    values = np.linspace(sigma_max / args.grid, sigma_max, args.grid)

    if args.d == 2:
        points = [(s1, s2) for s1 in values for s2 in values if s1 >= s2]
    else:
        points = [
            (s1, s2, s3)
            for s1 in values
            for s2 in values
            if s1 >= s2
            for s3 in values
            if s2 >= s3
        ]

    def evaluate(point):
        sigma = np.array(point)
        rhs = flows.chamber_flow_rhs(sigma, prob)
        return (*point, *rhs, flows.free_energy(sigma, prob))

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = list(pool.map(evaluate, points))

    header = (
        ["σ_" + str(i + 1) for i in range(args.d)]
        + ["dσ_" + str(i + 1) for i in range(args.d)]
        + ["F_beta"]
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    _report(
        "portrait",
        {
            "d": args.d,
            "N": str(depth),
            "beta": args.beta,
            "energy": args.energy,
            "grid": args.grid,
            "sigma_max": sigma_max,
            "out": args.out,
        },
        {"points": len(rows)},
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dln", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="entropy value, gradient, Hessian")
    p.add_argument("--sigma", required=True, help="comma-separated spectrum")
    p.add_argument("--N", required=True, help="depth (integer or 'inf')")
    p.add_argument("--offset", type=float, default=0.0)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("equilibrium", help="balance equation and rates")
    p.add_argument("--energy", required=True)
    p.add_argument("--N", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_equilibrium)

    p = sub.add_parser("flow", help="integrate a gradient-flow trajectory")
    p.add_argument("--level", required=True, choices=flows.LEVELS)
    p.add_argument("--N", required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--energy", required=True)
    p.add_argument("--init", required=True, help="comma-separated initial state")
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--rtol", type=float, default=1e-8)
    p.add_argument("--atol", type=float, default=1e-10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("quadrature", help="ODE vs closed-form time map residual")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--s-star", dest="s_star", type=float, required=True)
    p.add_argument("--s0", type=float, required=True)
    p.add_argument("--tmax", type=float, required=True)
    p.set_defaults(func=cmd_quadrature)

    p = sub.add_parser("audit", help="definiteness and inequality audits")
    p.add_argument("--mode", required=True, choices=["euclid", "riemann", "blocks", "skew"])
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("portrait", help="vector-field grid over the chamber")
    p.add_argument("--d", type=int, required=True, choices=[2, 3])
    p.add_argument("--N", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--energy", required=True)
    p.add_argument("--grid", type=int, default=40)
    p.add_argument("--sigma-max", dest="sigma_max", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_portrait)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DlnError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
