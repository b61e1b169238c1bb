"""Entropic regularization of deep linear networks: the entropy of the
balanced-manifold fibers, the induced Riemannian geometry, free-energy
gradient flows at several coordinate levels, equilibrium rates, and
closed-form checks."""

from .analysis import (
    DefinitenessReport,
    classify_symmetric,
    delta,
    euclidean_definiteness,
    hessian_block,
    meanfield_kernel,
    riemannian_definiteness_at_equal,
    riemannian_entropy_hessian_at_equal,
)
from .depth import Depth
from .energies import (
    SpectralEnergy,
    energy_from_label,
    energy_grad,
    energy_hessian_at_equal,
    energy_value,
    schatten,
)
from .entropy import (
    COINCIDENCE_RTOL,
    EntropyValue,
    PairKernels,
    entropy,
    entropy_grad,
    entropy_hessian,
    kernel_limits_at,
    pair_kernels,
    phi,
)
from .equilibrium import (
    EquilibriumReport,
    RateSpectrum,
    chamber_rates,
    dual_solution,
    entropy_thetas_at_equal,
    matrix_rate_spectrum,
    schatten_sigma_star,
    solve_balance,
)
from .errors import (
    DegenerateSpectrum,
    DegenerateWidth,
    DlnError,
    DomainViolation,
    NoBracket,
    NoConvergence,
    NonFinite,
    NonPositive,
    NotOrthogonal,
    OutOfDomain,
    RankDeficient,
    StepFailure,
)
from .exact import QuadratureParams, hyp2f1, quadrature_residual, time_map
from .flows import (
    LEVELS,
    FlowProblem,
    Trajectory,
    chamber_flow_rhs,
    diagonal_scalar_rhs,
    flow_rhs,
    free_energy,
    integrate,
    lambda_flow_rhs,
    lambda_to_sigma,
    matrix_flow_rhs,
    ratio_scale_rhs,
    trajectory_spectra,
)
from .geometry import (
    ChamberMetric,
    apply_A,
    apply_A_inverse,
    chamber_metric,
    gN_norm_sq,
    riemannian_hessian,
    submersion_residual,
)
from .spectra import (
    RANK_FLOOR,
    SvdTriple,
    as_matrix,
    as_positive_vector,
    as_spectrum,
    orbit_distance,
    orbit_point,
    svd,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
