"""Gradient-flow right-hand sides at every coordinate level and a shared
adaptive Dormand-Prince 4/5 integrator.

Levels
------
matrix   state is the flattened d x d end-to-end matrix X
chamber  state is the spectrum sigma (ordered at t0; ordering is preserved)
lambda   state is lambda = sigma^(1/N)
ratio    state is (u_1, ..., u_{d-1}, s) with lambda_i = u_i s, lambda_d = s
scalar   state is the single scale s on the diagonal invariant set
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .depth import Depth
from .energies import SpectralEnergy, energy_grad, energy_value
from .entropy import entropy, entropy_grad
from .equilibrium import solve_balance
from .errors import DlnError, NonPositive, StepFailure
from .spectra import as_matrix, as_positive_vector, svd

LEVELS = ("matrix", "chamber", "lambda", "ratio", "scalar")

SIGMA_FLOOR = 1e-12  # chamber boundary stop


@dataclass(frozen=True)
class FlowProblem:
    energy: SpectralEnergy | None
    depth: Depth
    beta: float
    level: str
    # scalar level: nu = N p and s_star are either given explicitly or derived
    # from (energy, depth, beta, width) through the balance equation
    width: int | None = None
    nu: float | None = None
    s_star: float | None = None

    def __post_init__(self):
        if self.level not in LEVELS:
            raise DlnError(f"unknown level {self.level!r}; expected one of {LEVELS}")
        if self.beta <= 0:
            raise NonPositive("beta must be positive")

    def scalar_params(self) -> tuple[float, float]:
        """(nu, s_star) for the diagonal scalar flow."""
        if self.nu is not None and self.s_star is not None:
            return self.nu, self.s_star
        p = _schatten_p(self.energy)
        n = self.depth.value
        if self.width is None:
            raise DlnError("scalar level needs width d (or explicit nu/s_star)")
        sigma_star = solve_balance(self.energy, self.beta, self.depth, self.width).sigma_star
        return n * p, sigma_star ** (1.0 / n)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # one row per time
    level: str
    terminal_reason: str  # MaxTime | Converged | BoundaryStop | StepFailure

    def to_csv(self, path) -> None:
        """17 significant digits; header names depend on the level."""
        m = self.states.shape[1]
        if self.level == "chamber":
            header = ["t"] + [f"σ_{i+1}" for i in range(m)]
        elif self.level == "matrix":
            d = int(round(m**0.5))
            header = ["t"] + [f"x_{i+1}{j+1}" for i in range(d) for j in range(d)]
        elif self.level == "lambda":
            header = ["t"] + [f"λ_{i+1}" for i in range(m)]
        elif self.level == "ratio":
            header = ["t"] + [f"u_{i+1}" for i in range(m - 1)] + ["s"]
        else:
            header = ["t", "s"]
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(header) + "\n")
            for t, row in zip(self.times, self.states):
                fh.write(",".join(f"{v:.17g}" for v in (t, *row)) + "\n")


def _schatten_p(e: SpectralEnergy | None) -> float:
    if e is None or e.schatten_p is None:
        raise DlnError("this flow level requires a Schatten energy")
    return e.schatten_p


def _metric_coeff(sigma: np.ndarray, depth: Depth) -> np.ndarray:
    """Inverse chamber metric g^ii (N sigma^(2-2/N), or sigma^2 at infinite
    depth under the rescaled metric)."""
    if depth.is_finite:
        n = depth.value
        return n * sigma ** (2.0 - 2.0 / n)
    return sigma**2


def free_energy(sigma, prob: FlowProblem) -> float:
    """F_beta(sigma) = E(sigma) - S(sigma)/beta, zero entropy offset."""
    sigma = as_positive_vector(sigma)
    return energy_value(prob.energy, sigma) - entropy(sigma, prob.depth).value / prob.beta


def chamber_flow_rhs(sigma, prob: FlowProblem) -> np.ndarray:
    sigma = as_positive_vector(sigma)
    grad_f = energy_grad(prob.energy, sigma) - entropy_grad(sigma, prob.depth) / prob.beta
    return -_metric_coeff(sigma, prob.depth) * grad_f


def matrix_flow_rhs(x, prob: FlowProblem) -> np.ndarray:
    """-A_{N,X}(dF_beta). For a spectral F_beta the differential is
    U diag(dF/dsigma) V^T, on which A acts by N sigma_k^(2-2/N), so the
    right-hand side is the chamber field lifted into the frozen SVD frame."""
    t = svd(as_matrix(x))
    sdot = chamber_flow_rhs(t.sigma, prob)
    return t.u @ np.diag(sdot) @ t.v.T


def _phi_kernel(a: float, b: float, n: int) -> float:
    """varphi_N(a, b) = a^(2N-1)/(a^2N - b^2N) - a/(N(a^2 - b^2)), through
    the cancellation-free ratio of positive power sums in (x, y) = (a^2, b^2):
    varphi = sum_j (N-1-j) x^(N-1-j) y^j / (a N sum_j x^(N-1-j) y^j), exact on
    the diagonal with value (N-1)/(2Na)."""
    x, y = a * a, b * b
    m = max(x, y)
    s0 = s1 = 0.0
    term = (x / m) ** (n - 1)
    ratio = y / x
    for j in range(n):
        s0 += term
        s1 += (n - 1 - j) * term
        term *= ratio
    return s1 / (a * n * s0)


def lambda_flow_rhs(lam, prob: FlowProblem) -> np.ndarray:
    lam = as_positive_vector(lam)
    p = _schatten_p(prob.energy)
    n = prob.depth.value
    d = lam.shape[0]
    out = np.empty(d)
    for i in range(d):
        pair = sum(_phi_kernel(lam[i], lam[k], n) for k in range(d) if k != i)
        out[i] = -lam[i] ** (n * p - 1.0) + pair / prob.beta
    return out


def ratio_scale_rhs(u, s: float, prob: FlowProblem) -> tuple[np.ndarray, float]:
    """The (u, s) system obtained from the lambda flow by lambda_i = u_i s,
    lambda_d = s. The set u = 1 is invariant (all kernels hit their diagonal
    limits there)."""
    u = np.asarray(u, dtype=float)
    if np.any(u < 1.0 - 1e-9) or s <= 0:
        raise NonPositive("ratio level needs u_i >= 1 and s > 0")
    p = _schatten_p(prob.energy)
    n = prob.depth.value
    np_pow = n * p
    psi = np.array([_phi_kernel(1.0, uj, n) for uj in u])
    psi_sum = float(np.sum(psi))
    ds = -(s ** (np_pow - 1.0)) + psi_sum / (prob.beta * s)
    du = np.empty(u.shape[0])
    for i, ui in enumerate(u):
        pair = sum(_phi_kernel(ui, uk, n) for k, uk in enumerate(u) if k != i)
        pair += _phi_kernel(ui, 1.0, n)
        du[i] = s ** (np_pow - 2.0) * (ui - ui ** (np_pow - 1.0)) + (
            pair - ui * psi_sum
        ) / (prob.beta * s * s)
    return du, ds


def diagonal_scalar_rhs(s: float, prob: FlowProblem) -> float:
    nu, s_star = prob.scalar_params()
    if s <= 0:
        raise NonPositive("scale s must be positive")
    return -(s ** (nu - 1.0)) + s_star**nu / s


def flow_rhs(y: np.ndarray, prob: FlowProblem) -> np.ndarray:
    """Flat-state dispatch used by the integrator."""
    if prob.level == "matrix":
        d = int(round(y.size**0.5))
        return matrix_flow_rhs(y.reshape(d, d), prob).ravel()
    if prob.level == "chamber":
        return chamber_flow_rhs(y, prob)
    if prob.level == "lambda":
        return lambda_flow_rhs(y, prob)
    if prob.level == "ratio":
        du, ds = ratio_scale_rhs(y[:-1], float(y[-1]), prob)
        return np.append(du, ds)
    return np.array([diagonal_scalar_rhs(float(y[0]), prob)])


# Dormand-Prince 5(4) tableau; solution is the 5th-order row, the last row of
# _A doubles as b (FSAL).
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B = np.append(_A[6], 0.0)
_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)


def integrate(
    prob: FlowProblem,
    y0,
    t_span: tuple[float, float],
    rtol: float = 1e-8,
    atol: float = 1e-10,
    sample_times=None,
    max_steps: int = 1_000_000,
) -> Trajectory:
    """Adaptive RK45 with PI step control. Steps never cross a requested
    sample time, so sampled states carry full step accuracy. Stops early with
    Converged when ||rhs||_inf <= atol on 3 consecutive accepted steps, or
    BoundaryStop when a chamber state touches the sigma floor."""
    if rtol <= 0 or atol <= 0:
        raise DlnError("rtol and atol must be positive")
    t0, t1 = float(t_span[0]), float(t_span[1])
    if t1 <= t0:
        raise DlnError("t_span must be increasing")
    y = np.asarray(y0, dtype=float).ravel().copy()

    record_all = sample_times is None
    pending = [] if record_all else sorted(float(t) for t in sample_times)
    times = [t0]
    states = [y.copy()]
    if pending and abs(pending[0] - t0) <= 1e-14 * max(1.0, abs(t0)):
        pending.pop(0)

    f = flow_rhs(y, prob)
    # initial step from the local scale of y and f
    scale = atol + rtol * np.abs(y)
    d0 = float(np.sqrt(np.mean((y / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f / scale) ** 2)))
    h = min(0.01 * d0 / d1 if d1 > 0 else 0.01 * (t1 - t0), 0.1 * (t1 - t0))
    h = max(h, 1e-12 * (t1 - t0))

    t = t0
    err_prev = 1.0
    quiet_steps = 0
    reason = "MaxTime"
    h_min = 1e-14 * (t1 - t0)
    k = [np.empty_like(y) for _ in range(7)]
    k[0] = f

    for _ in range(max_steps):
        if t >= t1 - 1e-14 * (t1 - t0):
            break
        target = pending[0] if pending else t1
        h_step = min(h, max(target - t, h_min), t1 - t)
        if h_step < h_min:
            reason = "StepFailure"
            break

        try:
            for i in range(1, 7):
                yi = y + h_step * sum(_A[i][j] * k[j] for j in range(i))
                k[i] = flow_rhs(yi, prob)
        except DlnError:
            # left the admissible region inside a stage: retry smaller
            h = 0.5 * h_step
            if h < h_min:
                reason = "StepFailure"
                break
            continue
        y_new = y + h_step * sum(_B[j] * k[j] for j in range(7))
        err_vec = h_step * sum(_E[j] * k[j] for j in range(7))
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))

        if err <= 1.0:
            t += h_step
            y = y_new
            k[0] = k[6]  # FSAL
            hit_sample = bool(pending) and abs(t - pending[0]) <= 1e-12 * max(1.0, t)
            if hit_sample:
                pending.pop(0)
            if record_all or hit_sample:
                times.append(t)
                states.append(y.copy())
            if prob.level == "chamber" and float(np.min(y)) <= SIGMA_FLOOR:
                reason = "BoundaryStop"
                break
            if float(np.max(np.abs(k[0]))) <= atol:
                quiet_steps += 1
                if quiet_steps >= 3:
                    reason = "Converged"
                    break
            else:
                quiet_steps = 0
            fac = 0.9 * err ** (-0.7 / 5.0) * err_prev ** (0.4 / 5.0) if err > 0 else 5.0
            err_prev = max(err, 1e-10)
            h = h_step * min(5.0, max(0.2, fac))
        else:
            h = h_step * max(0.2, 0.9 * err ** (-0.2))
            if h < h_min:
                reason = "StepFailure"
                break

    if t > times[-1]:
        times.append(t)
        states.append(y.copy())
    return Trajectory(
        times=np.array(times),
        states=np.array(states),
        level=prob.level,
        terminal_reason=reason,
    )


def trajectory_spectra(traj: Trajectory) -> np.ndarray:
    """sigma(t) for any level, one row per sample."""
    if traj.level == "chamber":
        return traj.states.copy()
    if traj.level == "matrix":
        d = int(round(traj.states.shape[1] ** 0.5))
        return np.array([svd(row.reshape(d, d)).sigma for row in traj.states])
    if traj.level == "lambda":
        raise DlnError("lambda trajectories need the depth to map to sigma")
    raise DlnError(f"no spectrum view for level {traj.level!r}")


def lambda_to_sigma(traj: Trajectory, depth: Depth) -> np.ndarray:
    if traj.level != "lambda":
        raise DlnError("expected a lambda-level trajectory")
    return traj.states ** depth.value
