"""Acceptance gate: one test per criterion, each printing a single
pass/fail line with the measured margin."""

import math
import time

import numpy as np

from dln import (
    Depth,
    FlowProblem,
    QuadratureParams,
    chamber_flow_rhs,
    chamber_rates,
    delta,
    dual_solution,
    entropy,
    entropy_grad,
    entropy_hessian,
    euclidean_definiteness,
    free_energy,
    integrate,
    matrix_flow_rhs,
    matrix_rate_spectrum,
    pair_kernels,
    quadrature_residual,
    riemannian_definiteness_at_equal,
    schatten,
    schatten_sigma_star,
    solve_balance,
    submersion_residual,
    svd,
    time_map,
)
from dln.cli import main as cli_main
from tests.conftest import VERDICTS, random_full_rank, random_spectrum

ALL_DEPTHS = [Depth.finite(2), Depth.finite(3), Depth.finite(5), Depth.finite(10), Depth.infinite()]


def _verdict(num, ok, detail):
    line = f"criterion {num:2d} [{'PASS' if ok else 'FAIL'}] {detail}"
    print(line)
    VERDICTS.append(line)  # echoed after the run by pytest_terminal_summary
    assert ok, line


def test_criterion_01_gradient_hessian_oracle():
    rng = np.random.default_rng(1)
    h = 1e-6
    worst_g, worst_h = 0.0, 0.0
    count = 0
    for dep in ALL_DEPTHS:
        for d in range(2, 7):
            for _ in range(4):
                sigma = random_spectrum(rng, d)
                count += 1
                g = entropy_grad(sigma, dep)
                hess = entropy_hessian(sigma, dep)
                for i in range(d):
                    e = np.zeros(d)
                    e[i] = h
                    fd = (entropy(sigma + e, dep).value - entropy(sigma - e, dep).value) / (2 * h)
                    worst_g = max(worst_g, abs(g[i] - fd))
                    fd_row = (entropy_grad(sigma + e, dep) - entropy_grad(sigma - e, dep)) / (2 * h)
                    worst_h = max(worst_h, float(np.max(np.abs(hess[:, i] - fd_row))))
    ok = worst_g <= 1e-6 and worst_h <= 1e-5
    _verdict(1, ok, f"grad/hess vs finite differences over {count} spectra: "
                    f"max grad err {worst_g:.2e} (tol 1e-6), max hess err {worst_h:.2e} (tol 1e-5)")


def test_criterion_02_submersion_isometry():
    rng = np.random.default_rng(2)
    worst = 0.0
    count = 0
    finite = [Depth.finite(n) for n in (2, 3, 5, 10)]
    while count < 100:
        for dep in finite:
            for d in (2, 3, 4, 5):
                if count >= 100:
                    break
                x = random_full_rank(rng, d)
                worst = max(worst, submersion_residual(x, dep, trials=4, seed=count))
                count += 1
    ok = worst <= 1e-9
    _verdict(2, ok, f"submersion residual over {count} matrices: max {worst:.2e} (tol 1e-9)")


def test_criterion_03_level_equivalence():
    start = time.time()
    n, p, beta, d = 3, 2.0, 1.0, 3
    dep = Depth.finite(n)
    e = schatten(p)
    sig0 = np.array([1.1, 0.7, 0.4])
    samples = [float(t) for t in np.linspace(1.0, 10.0, 10)]
    probc = FlowProblem(energy=e, depth=dep, beta=beta, level="chamber")
    tc = integrate(probc, sig0, (0.0, 10.0), rtol=1e-11, atol=1e-13, sample_times=samples)
    rng = np.random.default_rng(3)
    q1, _ = np.linalg.qr(rng.standard_normal((d, d)))
    q2, _ = np.linalg.qr(rng.standard_normal((d, d)))
    probm = FlowProblem(energy=e, depth=dep, beta=beta, level="matrix")
    tm = integrate(probm, (q1 @ np.diag(sig0) @ q2.T).ravel(), (0.0, 10.0),
                   rtol=1e-11, atol=1e-13, sample_times=samples)
    probl = FlowProblem(energy=e, depth=dep, beta=beta, level="lambda")
    tl = integrate(probl, sig0 ** (1.0 / n), (0.0, 10.0),
                   rtol=1e-11, atol=1e-13, sample_times=samples)
    m = min(len(tc.times), len(tm.times), len(tl.times))
    sig_c = tc.states[:m]
    sig_m = np.array([svd(row.reshape(d, d)).sigma for row in tm.states[:m]])
    sig_l = tl.states[:m] ** n
    err = max(float(np.max(np.abs(sig_m - sig_c))), float(np.max(np.abs(sig_l - sig_c))))
    elapsed = time.time() - start
    ok = err <= 1e-6 and elapsed < 10.0
    _verdict(3, ok, f"matrix/chamber/lambda sup-norm disagreement {err:.2e} "
                    f"(tol 1e-6) in {elapsed:.1f}s (limit 10s)")


def test_criterion_04_frozen_frames():
    dep = Depth.finite(3)
    e = schatten(2.0)
    rng = np.random.default_rng(4)
    sig0 = np.array([1.2, 0.8, 0.5])
    q1, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    q2, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    prob = FlowProblem(energy=e, depth=dep, beta=1.0, level="matrix")
    traj = integrate(prob, (q1 @ np.diag(sig0) @ q2.T).ravel(), (0.0, 5.0),
                     rtol=1e-11, atol=1e-13)
    t0 = svd(traj.states[0].reshape(3, 3))
    ref = t0.u @ t0.v.T
    worst = 0.0
    for row in traj.states:
        t = svd(row.reshape(3, 3))
        worst = max(worst, float(np.linalg.norm(t.u @ t.v.T - ref)))
    ok = worst <= 1e-6
    _verdict(4, ok, f"max ||U(t)V(t)^T - U(0)V(0)^T||_F along trajectory {worst:.2e} (tol 1e-6)")


def test_criterion_05_equilibrium_value():
    dep = Depth.finite(10)
    e = schatten(2.0)
    prob = FlowProblem(energy=e, depth=dep, beta=5.0, level="chamber")
    traj = integrate(prob, [0.6, 0.1], (0.0, 200.0), rtol=1e-10, atol=1e-12)
    end_err = float(np.max(np.abs(traj.states[-1] - 0.3)))
    sweep_err = 0.0
    for p in (1.5, 2.0, 3.0):
        for beta in (0.5, 5.0):
            for d in (2, 4):
                for dd in ALL_DEPTHS:
                    got = solve_balance(schatten(p), beta, dd, d).sigma_star
                    want = schatten_sigma_star(p, beta, dd, d)
                    sweep_err = max(sweep_err, abs(got - want) / max(want, 1.0))
    ok = end_err <= 1e-6 and sweep_err <= 1e-12
    _verdict(5, ok, f"(N,p,beta,d)=(10,2,5,2) endpoint err {end_err:.2e} (tol 1e-6); "
                    f"bisection vs closed form sweep {sweep_err:.2e} (tol 1e-12)")


def _fd_jacobian(fun, x0, h):
    n = x0.size
    jac = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        jac[:, j] = (fun(x0 + e) - fun(x0 - e)) / (2 * h)
    return jac


def test_criterion_06_linearization_rates():
    n, p, beta, d = 3, 2.0, 2.0, 3
    dep = Depth.finite(n)
    e = schatten(p)
    rates = chamber_rates(e, beta, dep, d)
    mspec = matrix_rate_spectrum(e, beta, dep, d)
    s = solve_balance(e, beta, dep, d).sigma_star
    prob = FlowProblem(energy=e, depth=dep, beta=beta, level="chamber")

    jac = _fd_jacobian(lambda v: chamber_flow_rhs(v, prob), np.full(d, s), 1e-6 * s)
    eigs = np.sort(np.linalg.eigvals(jac).real)
    want = np.sort([rates.rho_one] + [rates.rho_perp] * (d - 1))
    err_c = float(np.max(np.abs(eigs - want) / np.abs(want)))

    probm = FlowProblem(energy=e, depth=dep, beta=beta, level="matrix")

    def mrhs(v):
        return matrix_flow_rhs(v.reshape(d, d), probm).ravel()

    jac_m = _fd_jacobian(mrhs, (s * np.eye(d)).ravel(), 1e-6 * s)
    eigs_m = np.sort(np.linalg.eigvals(jac_m).real)
    n_zero = d * (d - 1) // 2
    n_perp = d * (d + 1) // 2 - 1
    want_m = np.sort([0.0] * n_zero + [mspec.rho_one] + [mspec.rho_perp] * n_perp)
    scale = abs(mspec.rho_perp)
    err_m = float(np.max(np.abs(eigs_m - want_m))) / scale

    # decay-rate fits from trajectories perturbed along span{1} and its
    # orthogonal complement
    def fit_rate(direction):
        y0 = np.full(d, s) + 1e-4 * direction
        samples = [float(t) for t in np.linspace(0.2, 1.4, 7)]
        traj = integrate(prob, y0, (0.0, 1.4), rtol=1e-12, atol=1e-14, sample_times=samples)
        dev = np.linalg.norm(traj.states - s, axis=1)
        keep = dev > 0
        slope = np.polyfit(traj.times[keep], np.log(dev[keep]), 1)[0]
        return slope

    rho1_fit = fit_rate(np.ones(d) / np.sqrt(d))
    rhop_fit = fit_rate(np.array([1.0, 0.0, -1.0]) / np.sqrt(2))
    fit_err = max(abs(rho1_fit - rates.rho_one) / abs(rates.rho_one),
                  abs(rhop_fit - rates.rho_perp) / abs(rates.rho_perp))

    ok = err_c <= 1e-5 and err_m <= 1e-5 and fit_err <= 0.02
    _verdict(6, ok, f"FD Jacobian eigenvalues: chamber rel err {err_c:.2e}, "
                    f"matrix rel err {err_m:.2e} (tol 1e-5); decay fits rel err "
                    f"{fit_err:.2e} (tol 2e-2)")


def test_criterion_07_time_map_quadrature():
    worst = 0.0
    for nu, tmax in ((2.0, 3.0), (4.0, 2.0), (20.0, 0.8)):
        params = QuadratureParams(nu=nu, s_star=1.0)
        prob = FlowProblem(energy=None, depth=Depth.finite(2), beta=1.0,
                           level="scalar", nu=nu, s_star=1.0)
        traj = integrate(prob, [0.3], (0.0, tmax), rtol=1e-10, atol=1e-12)
        worst = max(worst, quadrature_residual(traj, params))
    params2 = QuadratureParams(nu=2.0, s_star=1.0)
    log_err = max(
        abs(time_map(s, params2) + 0.5 * math.log(1.0 - s * s)) for s in (0.1, 0.4, 0.8)
    )
    ok = worst <= 1e-8 and log_err <= 1e-10
    _verdict(7, ok, f"quadrature residual over nu in (2,4,20): {worst:.2e} (tol 1e-8); "
                    f"nu=2 log closed form err {log_err:.2e} (tol 1e-10)")


def test_criterion_08_euclidean_concavity_audit():
    rng = np.random.default_rng(8)
    bad = 0
    for _ in range(500):
        n = int(rng.choice([3, 4, 5, 7, 10]))
        d = int(rng.integers(2, 6))
        rep = euclidean_definiteness(random_spectrum(rng, d), Depth.finite(n))
        bad += rep.classification != "NegativeDefinite"
    for d in (3, 4, 5):
        rep = euclidean_definiteness(random_spectrum(rng, d), Depth.finite(2))
        bad += rep.classification != "NegativeDefinite"
    hess22 = entropy_hessian(np.array([2.0, 1.0]), Depth.finite(2))
    eigs, vecs = np.linalg.eigh(hess22)
    rep22 = euclidean_definiteness(np.array([2.0, 1.0]), Depth.finite(2))
    kernel = vecs[:, int(np.argmin(np.abs(eigs)))]
    kernel_err = min(np.linalg.norm(kernel - [1, -1] / np.sqrt(2)),
                     np.linalg.norm(kernel + [1, -1] / np.sqrt(2)))
    delta_err = max(
        abs(delta(1.0, Depth.finite(n)) - (n - 2) * (n - 1) ** 2 / (12.0 * n**3))
        for n in range(3, 13)
    )
    ok = (bad == 0 and rep22.classification == "NegativeSemidefinite"
          and rep22.rank == 1 and kernel_err <= 1e-10 and delta_err <= 1e-12)
    _verdict(8, ok, f"negative-definite violations {bad}/503; (2,2) rank "
                    f"{rep22.rank} kernel err {kernel_err:.2e}; Delta_N(1) err "
                    f"{delta_err:.2e} (tol 1e-12)")


def test_criterion_09_riemannian_signature_audit():
    worst = 0.0
    bad = 0
    for s in (0.3, 1.0, 2.0):
        for d in range(2, 7):
            for n in range(2, 11):
                t1, tp, rep = riemannian_definiteness_at_equal(s, d, Depth.finite(n))
                bad += not (rep.n_neg == 1 and rep.n_pos == d - 1)
                want_1 = -(d - 1) * (n - 1) / (2.0 * s * s * n * n)
                want_p = (d / 6.0 - (d - 1) / (2.0 * n) + (2 * d - 3) / (6.0 * n * n)) / (s * s)
                eigs = np.sort(rep.eigenvalues)
                worst = max(worst, abs(eigs[0] - want_1),
                            float(np.max(np.abs(eigs[1:] - want_p))),
                            abs(t1 - want_1), abs(tp - want_p))
    ok = bad == 0 and worst <= 1e-10
    _verdict(9, ok, f"signature violations {bad}; max |theta - formula| {worst:.2e} (tol 1e-10)")


def test_criterion_10_inequality_fuzzing():
    rng = np.random.default_rng(10)
    violations = 0
    for _ in range(300):
        b = float(rng.uniform(0.1, 3.0))
        a = b * float(rng.uniform(1.001, 10.0))
        for dep in ALL_DEPTHS:
            k_ab = pair_kernels(a, b, dep)
            k_ba = pair_kernels(b, a, dep)
            violations += k_ab.r - k_ba.r > 1e-12
            if dep.is_finite and dep.value == 2:
                violations += abs(k_ab.r - k_ba.r) > 1e-12
            else:
                violations += not (k_ab.r < k_ba.r)
            violations += k_ab.p >= 0 or k_ab.q >= 0 or k_ba.q >= 0
    # monotone decrease of a -> r_N(a, b) on ladders above b
    for dep in ALL_DEPTHS:
        for _ in range(20):
            b = float(rng.uniform(0.2, 2.0))
            ladder = b * np.sort(rng.uniform(1.01, 8.0, size=6))
            vals = [pair_kernels(float(a), b, dep).r for a in ladder]
            violations += sum(y - x > 1e-12 for x, y in zip(vals, vals[1:]))
    # Lyapunov monotonicity of F_beta along 100 random trajectories
    for i in range(100):
        n = int(rng.choice([2, 3, 10]))
        d = int(rng.integers(2, 4))
        prob = FlowProblem(energy=schatten(float(rng.choice([1.5, 2.0, 3.0]))),
                           depth=Depth.finite(n), beta=float(rng.uniform(0.5, 5.0)),
                           level="chamber")
        traj = integrate(prob, random_spectrum(rng, d), (0.0, 1.0), rtol=1e-10, atol=1e-12)
        f = np.array([free_energy(row, prob) for row in traj.states])
        violations += int(np.any(np.diff(f) > 1e-12))
    ok = violations == 0
    _verdict(10, ok, f"skew/monotone/sign/Lyapunov violations: {violations} (tol 1e-12)")


def test_criterion_11_dual_problem():
    worst = 0.0
    for p in (1.0, 2.0, 3.0, 4.0):
        for d in (2, 3, 5):
            for dep in ALL_DEPTHS:
                s, lam = dual_solution(p, d, dep)
                factor = 1.0 - 1.0 / dep.value if dep.is_finite else 1.0
                worst = max(worst,
                            abs(s - (p / d) ** (1.0 / p)),
                            abs(lam - math.comb(d, 2) * factor / p),
                            abs(d * s**p / p - 1.0))
    ok = worst <= 1e-14
    _verdict(11, ok, f"dual solution + constraint E_p=1 max err {worst:.2e}")


def test_criterion_12_phase_portrait(tmp_path):
    start = time.time()
    out = tmp_path / "grid.csv"
    code = cli_main([
        "portrait", "--d", "2", "--N", "10", "--beta", "5",
        "--energy", "schatten:p=2", "--grid", "40", "--sigma-max", "0.6",
        "--out", str(out),
    ])
    assert code == 0
    rows = np.loadtxt(out, delimiter=",", skiprows=1)
    speed = np.hypot(rows[:, 2], rows[:, 3])
    still = rows[speed <= 1e-8]
    dist = np.hypot(still[:, 0] - 0.3, still[:, 1] - 0.3) if len(still) else np.array([np.inf])
    near_only = len(still) >= 1 and float(np.max(dist)) < 0.05
    # trajectories terminate on the diagonal
    prob = FlowProblem(energy=schatten(2.0), depth=Depth.finite(10), beta=5.0, level="chamber")
    diag_err = 0.0
    for y0 in ([0.55, 0.05], [0.6, 0.3], [0.15, 0.1]):
        traj = integrate(prob, y0, (0.0, 300.0), rtol=1e-10, atol=1e-12)
        diag_err = max(diag_err, abs(traj.states[-1][0] - traj.states[-1][1]))
    elapsed = time.time() - start
    ok = near_only and diag_err <= 1e-6 and elapsed < 30.0
    _verdict(12, ok, f"stationary grid points: {len(still)}, all within 0.05 of "
                     f"(0.3,0.3): {near_only}; trajectory diagonal gap {diag_err:.2e} "
                     f"(tol 1e-6); {elapsed:.1f}s (limit 30s)")
