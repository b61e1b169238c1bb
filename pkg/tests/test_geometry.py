import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dln import (
    DegenerateSpectrum,
    Depth,
    RankDeficient,
    apply_A,
    apply_A_inverse,
    chamber_metric,
    entropy_grad,
    entropy_hessian,
    gN_norm_sq,
    riemannian_hessian,
    submersion_residual,
)
from tests.conftest import FINITE_DEPTHS, random_full_rank, random_spectrum


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1), st.integers(min_value=2, max_value=5))
def test_apply_A_round_trip_and_positivity(seed, d):
    rng = np.random.default_rng(seed)
    x = random_full_rank(rng, d)
    for dep in FINITE_DEPTHS:
        p = rng.standard_normal((d, d))
        z = apply_A(x, p, dep)
        back = apply_A_inverse(x, z, dep)
        assert np.max(np.abs(back - p)) < 1e-9 * max(1.0, np.max(np.abs(p)))
        # A is positive definite on matrices: <P, A P> > 0
        assert float(np.sum(p * z)) > 0
        assert gN_norm_sq(x, z, dep) > 0


def test_apply_A_diagonal_action():
    """On the frame element u_k v_k^T the operator multiplies by
    N sigma_k^(2-2/N)."""
    sigma = np.array([2.0, 1.0, 0.5])
    x = np.diag(sigma)
    for dep in FINITE_DEPTHS:
        n = dep.value
        z = apply_A(x, np.eye(3), dep)
        expected = np.diag(n * sigma ** (2.0 - 2.0 / n))
        assert np.max(np.abs(z - expected)) < 1e-12


def test_apply_A_rejects_rank_deficient():
    with pytest.raises(RankDeficient):
        apply_A(np.diag([1.0, 0.0]), np.eye(2), Depth.finite(3))


def test_chamber_metric_values():
    sigma = np.array([2.0, 0.5])
    m = chamber_metric(sigma, Depth.finite(4))
    np.testing.assert_allclose(m.diag, sigma ** (2.0 / 4 - 2.0) / 4, rtol=1e-15)
    m_inf = chamber_metric(sigma, Depth.infinite())
    np.testing.assert_allclose(m_inf.diag, sigma ** -2.0, rtol=1e-15)


def test_submersion_isometry(rng):
    for dep in FINITE_DEPTHS:
        for d in (2, 3, 4):
            x = random_full_rank(rng, d)
            assert submersion_residual(x, dep, trials=5, seed=7) < 1e-9


def test_submersion_rejects_degenerate():
    x = np.diag([1.0, 1.0 + 1e-6])
    with pytest.raises(DegenerateSpectrum):
        submersion_residual(x, Depth.finite(3), trials=1)


def test_riemannian_hessian_correction(rng):
    sigma = random_spectrum(rng, 3)
    for dep in FINITE_DEPTHS + [Depth.infinite()]:
        g = entropy_grad(sigma, dep)
        h = entropy_hessian(sigma, dep)
        rh = riemannian_hessian(sigma, g, h, dep)
        factor = (dep.value - 1) / dep.value if dep.is_finite else 1.0
        np.testing.assert_allclose(rh - h, np.diag(factor * g / sigma), atol=1e-15)
