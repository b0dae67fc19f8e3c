"""Benign-landscape certificates and solvers for synchronization on spheres.

The package certifies when the nonconvex problem

    max <C, Y Y^T>  s.t. every row of Y is a unit vector in R^r

has no spurious second-order critical points (via condition numbers of
preconditioned certificate Laplacians), solves it by Riemannian gradient
ascent, simulates the equivalent homogeneous Kuramoto oscillator dynamics
for r = 2, generates the standard random model families, and evaluates
closed-form spectra of nearest-neighbor circulant graphs.
"""

from .core import (
    Alignment,
    Laplacian,
    PhaseVector,
    RetractionSingularity,
    SignVector,
    SphereConfig,
    SymmetricCost,
    alignment,
    angles_to_config,
    certificate_matrix,
    config_to_angles,
    degree_vector,
    laplacian,
    objective,
    operator_norm,
    precondition,
    recovery_check,
    retract,
    tangent_project,
)
from .certificates import (
    CertificateReport,
    RankOneReference,
    benign_landscape_check,
    benign_landscape_check_complex,
    certify_sdp_optimality,
    expander_alpha,
    kuramoto_sync_check,
    rank_one_bound,
    spectrum,
)
from .circulant import (
    CirculantSpectrum,
    DensityLimit,
    StabilityRecord,
    critical_density,
    density_limit,
    dft_spectrum,
    finite_size_stability,
    limit_kappa,
)
from .kuramoto import (
    EquilibriumReport,
    SimOptions,
    classify_equilibrium,
    simulate,
    twisted_state,
)
from .models import ModelSpec, generate
from .optimizer import (
    SolveOptions,
    SolveReport,
    ascend,
    hessian_quadratic_form,
    min_curvature_direction,
    random_init,
    riemannian_gradient,
    solve,
)

__version__ = "0.1.0"
