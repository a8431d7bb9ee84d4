"""Stability certificates and dynamics for affine softmax feedback systems.

A system couples one or more probability simplices through an affine payoff
map and a blockwise softmax response at per-block inverse temperatures. This
package certifies when such a system has a unique, globally attracting fixed
point, simulates its discrete and continuous dynamics with proved error
envelopes, and generates the canonical example families (two-action
pitchfork, signed Hadamard block couplings, feed-forward influence chains,
seeded random ensembles).
"""

from .certificates import (
    BetaRange,
    CertificateCheck,
    CertificateReport,
    certified_beta_range,
    certify,
    certify_contraction,
    certify_dobrushin,
    certify_symmetric,
)
from .dynamics import TrajectoryRecord, logit_ode, multi_start_collapse, picard
from .geometry import (
    ProductPoint,
    SimplexPoint,
    TangentVector,
    normalize,
    project_tangent,
    softmax,
    softmax_covariance,
)
from .instances import (
    PitchforkDiagram,
    SeedSpec,
    dirichlet_start,
    hadamard_separation,
    pitchfork_diagram,
    pitchfork_system,
    random_instance,
    solve_pitchfork,
    sylvester_hadamard,
    upper_triangular_counterexample,
)
from .potential import (
    PotentialEval,
    entropy_curvature_check,
    eval_potential,
    tangent_hessian_quadform,
    variational_uniqueness,
)
from .spectral import (
    block_tangent_norm,
    l1_operator_norm,
    spectral_norm,
    spectral_radius_nonneg,
    tangent_lambda_max,
    tangent_operator_norm,
)
from .system import (
    AffineLogitSystem,
    SymmetryTag,
    load_system,
    response,
    response_jacobian,
    save_system,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "AffineLogitSystem",
    "BetaRange",
    "CertificateCheck",
    "CertificateReport",
    "PitchforkDiagram",
    "PotentialEval",
    "ProductPoint",
    "SeedSpec",
    "SimplexPoint",
    "SymmetryTag",
    "TangentVector",
    "TrajectoryRecord",
    "block_tangent_norm",
    "certified_beta_range",
    "certify",
    "certify_contraction",
    "certify_dobrushin",
    "certify_symmetric",
    "dirichlet_start",
    "entropy_curvature_check",
    "eval_potential",
    "hadamard_separation",
    "l1_operator_norm",
    "load_system",
    "logit_ode",
    "multi_start_collapse",
    "normalize",
    "picard",
    "pitchfork_diagram",
    "pitchfork_system",
    "project_tangent",
    "random_instance",
    "response",
    "response_jacobian",
    "save_system",
    "softmax",
    "softmax_covariance",
    "solve_pitchfork",
    "spectral_norm",
    "spectral_radius_nonneg",
    "sylvester_hadamard",
    "tangent_hessian_quadform",
    "tangent_lambda_max",
    "tangent_operator_norm",
    "upper_triangular_counterexample",
    "validate",
    "variational_uniqueness",
]
