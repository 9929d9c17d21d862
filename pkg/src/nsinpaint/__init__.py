"""Grayscale image inpainting by transport-energy minimization.

Fills user-marked regions by minimizing E(u) = ||F(u)||^2 / 2, where
F = perp-grad(u) . grad(Lap u) is the defect of the steady transport
equation that carries image smoothness along level lines.  Steepest
descent uses either the plain Euler-Lagrange gradient or its smoothed
(Sobolev) counterparts obtained by applying resolvent powers
(I - Lap)^{-k}, which precondition the iteration and need no diffusion
term.  An explicit transport-evolution baseline, an SOR harmonic
initializer, condition-number diagnostics, image I/O, and a CLI round out
the package.
"""

from .conditioning import (
    ConditionReport,
    condition_report,
    dirichlet_eigenvalue,
    dirichlet_eigenvector,
    relative_condition,
    spectral_attenuation_check,
)
from .energy import (
    EnergyState,
    GradientKind,
    compute_state,
    energy,
    gradient,
    gradient_el,
    residual,
)
from .errors import (
    AllZeroImage,
    EmptyMask,
    FactorTooSmall,
    InpaintError,
    InvalidDomain,
    IoError,
    LengthMismatch,
    MaskTouchesBorder,
    NonFiniteEnergy,
    NonFiniteValues,
    NotPositiveDefinite,
    ShapeMismatch,
    SorDidNotConverge,
    StepUnderflow,
    UnsupportedFormat,
    ZeroEnergy,
)
from .grid import (
    BORDER_MARGIN,
    DILATION_RADIUS,
    GrayImage,
    InpaintDomain,
    extract_domain,
    restrict,
    scatter,
)
from .imageio import expand_nearest, load_image, load_mask, save_image, to_uint8
from .operators import (
    OperatorSet,
    PreconditionerFactorization,
    RestrictedOperator,
    build_operators,
    factor_preconditioner,
    laplacian_on_omega,
    solve_k,
)
from .solver import (
    ConvergenceTrace,
    SolverConfig,
    StopReason,
    TraceRecord,
    harmonic_init,
    line_search,
    minimize,
)
from .transport import BbsConfig, bbs_run, bbs_step, perona_malik_pass

__version__ = "0.1.0"

__all__ = [
    "AllZeroImage",
    "BbsConfig",
    "BORDER_MARGIN",
    "ConditionReport",
    "ConvergenceTrace",
    "DILATION_RADIUS",
    "EmptyMask",
    "EnergyState",
    "FactorTooSmall",
    "GradientKind",
    "GrayImage",
    "InpaintDomain",
    "InpaintError",
    "InvalidDomain",
    "IoError",
    "LengthMismatch",
    "MaskTouchesBorder",
    "NonFiniteEnergy",
    "NonFiniteValues",
    "NotPositiveDefinite",
    "OperatorSet",
    "PreconditionerFactorization",
    "RestrictedOperator",
    "ShapeMismatch",
    "SolverConfig",
    "SorDidNotConverge",
    "StepUnderflow",
    "StopReason",
    "TraceRecord",
    "UnsupportedFormat",
    "ZeroEnergy",
    "bbs_run",
    "bbs_step",
    "build_operators",
    "compute_state",
    "condition_report",
    "dirichlet_eigenvalue",
    "dirichlet_eigenvector",
    "energy",
    "expand_nearest",
    "extract_domain",
    "factor_preconditioner",
    "gradient",
    "gradient_el",
    "harmonic_init",
    "laplacian_on_omega",
    "line_search",
    "load_image",
    "load_mask",
    "minimize",
    "perona_malik_pass",
    "relative_condition",
    "residual",
    "restrict",
    "save_image",
    "scatter",
    "solve_k",
    "spectral_attenuation_check",
    "to_uint8",
]
