"""Global stability certificates for affine block logit systems.

Four certificates are computed, with the raw value, the threshold, a strict
pass/fail verdict, and the margin for each:

* ambient (classical): q_old = ||B_beta W||_2, passes iff < 1. This treats
  softmax as a unit-scale Lipschitz map and ignores the simplex geometry.
* tangent (covariance-calibrated): q_new = (1/2) ||B_beta P W P||_2 on the
  block tangent space, passes iff < 1. The 1/2 is the sharp Euclidean norm
  bound of the softmax covariance; the projection quotients out payoff
  shifts and infeasible directions. Passing makes the response map a global
  contraction with factor q_new.
* symmetric (curvature): for W = W^T, the largest tangent eigenvalue of
  B^{1/2} P W P B^{1/2}, passes iff < 2; entropy contributes tangent
  curvature at least 2, so passing makes the block potential strictly
  concave and the fixed point unique.
* dobrushin: spectral radius of the block influence matrix
  C_ab = (beta_a / 2) ||P_a W^{ab} P_b||_{1->1}, passes iff < 1.

Verdicts use strict inequality with no tolerance slack; exact-equality cases
are flagged as boundary (not certified) and the margins let callers apply
their own slack.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import spectral
from .system import AffineLogitSystem


@dataclass(frozen=True)
class CertificateCheck:
    """One certified quantity with its strict verdict and raw margin."""

    value: float
    threshold: float
    passed: bool
    margin: float
    boundary: bool

    @classmethod
    def strict(cls, value: float, threshold: float) -> "CertificateCheck":
        return cls(
            value=float(value),
            threshold=float(threshold),
            passed=bool(value < threshold),
            margin=float(threshold - value),
            boundary=bool(value == threshold),
        )

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "threshold": self.threshold,
            "passed": self.passed,
            "margin": self.margin,
            "boundary": self.boundary,
        }


@dataclass(frozen=True)
class ContractionResult:
    """Ambient and tangent contraction factors with their verdicts."""

    q_old: CertificateCheck
    q_new: CertificateCheck

    @property
    def verdicts(self) -> dict:
        return {"old": self.q_old.passed, "new": self.q_new.passed}


def certify_contraction(system: AffineLogitSystem) -> ContractionResult:
    """Classical ambient factor and covariance-calibrated tangent factor."""
    q_old = spectral.spectral_norm(system.beta_per_coord[:, None] * system.W)
    q_new = 0.5 * spectral.block_tangent_norm(system, scaled=True)
    return ContractionResult(
        q_old=CertificateCheck.strict(q_old, 1.0),
        q_new=CertificateCheck.strict(q_new, 1.0),
    )


@dataclass(frozen=True)
class SymmetricResult:
    """Scaled tangent curvature certificate for symmetric interactions.

    unconditional is set when the scaled tangent operator is negative
    semidefinite; the certificate then passes for every temperature, since
    rescaling beta changes magnitudes but not signs.
    """

    kappa_scaled: float
    check: CertificateCheck
    unconditional: bool


def certify_symmetric(system: AffineLogitSystem) -> SymmetricResult:
    """Largest tangent eigenvalue of B^{1/2} P W P B^{1/2}; passes iff < 2."""
    if not system.is_symmetric():
        raise ValueError("symmetric certificate requires W = W^T (to 1e-10)")
    s = np.sqrt(system.beta_per_coord)
    P = spectral.block_projection_matrix(system.block_dims)
    M = (s[:, None] * (P @ system.W @ P)) * s[None, :]
    Q = spectral.block_tangent_basis(system.block_dims)
    if Q.shape[1] == 0:
        kappa = 0.0
    else:
        A = Q.T @ M @ Q
        kappa = float(np.linalg.eigvalsh(0.5 * (A + A.T))[-1])
    return SymmetricResult(
        kappa_scaled=kappa,
        check=CertificateCheck.strict(kappa, 2.0),
        unconditional=bool(kappa <= 0.0),
    )


@dataclass(frozen=True)
class DobrushinResult:
    """Block l1 influence matrix and its spectral radius; passes iff < 1."""

    rho: float
    check: CertificateCheck
    influence: np.ndarray


def certify_dobrushin(system: AffineLogitSystem) -> DobrushinResult:
    """Spectral radius of C_ab = (beta_a/2) ||P_a W^{ab} P_b||_{1->1}.

    The row block's temperature scales the row, mirroring the beta factor
    carried by that block's response Jacobian.
    """
    m = system.n_blocks
    slices = system.block_slices
    C = np.zeros((m, m))
    for a in range(m):
        Pa = spectral.projection_matrix(system.block_dims[a])
        for b in range(m):
            Pb = spectral.projection_matrix(system.block_dims[b])
            blk = system.W[slices[a], slices[b]]
            C[a, b] = 0.5 * system.beta[a] * spectral.l1_operator_norm(Pa @ blk @ Pb)
    rho = spectral.spectral_radius_nonneg(C)
    return DobrushinResult(rho=rho, check=CertificateCheck.strict(rho, 1.0), influence=C)


# Tangent norms below this floor (relative to the ambient norm) are treated
# as exact zeros when forming threshold ratios.
_ZERO_NORM_RTOL = 1e-12


@dataclass(frozen=True)
class BetaRange:
    """Certified inverse-temperature thresholds with beta treated as free.

    beta_old = 1 / ||W||_2 is the classical ambient threshold, beta_new =
    2 / ||P W P||_2 the tangent threshold, and gain their ratio
    2 ||W||_2 / ||P W P||_2, at least 2 whenever the tangent part is nonzero
    (and +inf when it vanishes).
    """

    beta_old: float
    beta_new: float
    gain: float
    norm_ambient: float
    norm_tangent: float


def certified_beta_range(system: AffineLogitSystem) -> BetaRange:
    """Thresholds on a system with one uniform free inverse temperature."""
    if not system.has_uniform_beta():
        raise ValueError(
            f"certified beta range needs a uniform inverse temperature, got {system.beta}"
        )
    norm_ambient = spectral.spectral_norm(system.W)
    norm_tangent = spectral.block_tangent_norm(system, scaled=False)
    if norm_tangent <= _ZERO_NORM_RTOL * max(1.0, norm_ambient):
        norm_tangent_eff = 0.0
    else:
        norm_tangent_eff = norm_tangent
    beta_old = np.inf if norm_ambient == 0.0 else 1.0 / norm_ambient
    beta_new = np.inf if norm_tangent_eff == 0.0 else 2.0 / norm_tangent_eff
    if norm_tangent_eff == 0.0:
        gain = np.inf
    else:
        gain = 2.0 * norm_ambient / norm_tangent_eff
    return BetaRange(
        beta_old=float(beta_old),
        beta_new=float(beta_new),
        gain=float(gain),
        norm_ambient=float(norm_ambient),
        norm_tangent=float(norm_tangent),
    )


@dataclass(frozen=True)
class CertificateReport:
    """All certificates for one system, plus serialization to plain dicts."""

    q_old: float
    q_new: float
    kappa_scaled: float | None
    dobrushin_rho: float
    beta_old: float | None
    beta_new: float | None
    gain: float | None
    verdicts: dict
    checks: dict = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "q_old": self.q_old,
            "q_new": self.q_new,
            "kappa_scaled": self.kappa_scaled,
            "dobrushin_rho": self.dobrushin_rho,
            "beta_old": self.beta_old,
            "beta_new": self.beta_new,
            "gain": self.gain,
            "verdicts": dict(self.verdicts),
            "checks": {k: v.to_dict() for k, v in self.checks.items()},
        }


def certify(system: AffineLogitSystem) -> CertificateReport:
    """Run every applicable certificate and assemble one report.

    The symmetric certificate is included only for symmetric W, and the
    beta thresholds only for systems with a uniform inverse temperature.
    """
    contraction = certify_contraction(system)
    dobrushin = certify_dobrushin(system)
    checks = {
        "old": contraction.q_old,
        "new": contraction.q_new,
        "dobrushin": dobrushin.check,
    }
    kappa = None
    if system.is_symmetric():
        sym = certify_symmetric(system)
        kappa = sym.kappa_scaled
        checks["symmetric"] = sym.check
    beta_old = beta_new = gain = None
    if system.has_uniform_beta():
        rng = certified_beta_range(system)
        beta_old, beta_new, gain = rng.beta_old, rng.beta_new, rng.gain
    return CertificateReport(
        q_old=contraction.q_old.value,
        q_new=contraction.q_new.value,
        kappa_scaled=kappa,
        dobrushin_rho=dobrushin.rho,
        beta_old=beta_old,
        beta_new=beta_new,
        gain=gain,
        verdicts={k: v.passed for k, v in checks.items()},
        checks=checks,
    )
