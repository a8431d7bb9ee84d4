"""Entropy-regularized potentials for symmetric interactions.

For W = W^T the block logit fixed points are exactly the interior
stationary points of the concave-when-certified objective

    Psi(x) = sum_a (1/beta_a) H(x^a) + (1/2) x^T W x + b^T x,

with H the Shannon entropy of a block. For a single block the classical
single-temperature object Phi_beta = beta * Psi is reported instead; all
internal computation goes through the Psi normalization so the two cases
share one code path, and every result records which form it states.

The tangent Hessian of the entropy term is -diag(1/x) blockwise, and along
zero-sum directions it satisfies sum_i v_i^2 / x_i >= 2 ||v||^2, the
curvature fact behind the factor-two certificate threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spectral
from .certificates import certify_symmetric
from .geometry import ProductPoint, SimplexPoint, TangentVector
from .instances import SeedSpec, make_rng
from .system import AffineLogitSystem

INTERIOR_ATOL = 1e-12
_NEAR_BOUNDARY_FLAG = 1e-8


def _require_symmetric(system: AffineLogitSystem) -> None:
    if not system.is_symmetric():
        raise ValueError("potential evaluation requires W = W^T (to 1e-10)")


def _interior_values(system: AffineLogitSystem, x: ProductPoint) -> np.ndarray:
    if x.dims != system.block_dims:
        raise ValueError(f"point dims {x.dims} do not match system dims {system.block_dims}")
    v = x.flat()
    lo = float(np.min(v))
    if lo < INTERIOR_ATOL:
        raise ValueError(
            f"point has coordinate {lo:.3e} below the interior guard {INTERIOR_ATOL}"
        )
    return v


def _block_project(g: np.ndarray, slices) -> np.ndarray:
    out = g.copy()
    for sl in slices:
        out[sl] -= np.mean(out[sl])
        out[sl] -= np.mean(out[sl])
    return out


@dataclass(frozen=True)
class PotentialEval:
    """Potential value, gradient, stationarity residual, tangent curvature.

    form is "phi" (single block, value beta * Psi) or "psi". kkt_residual is
    the norm of the block-tangent projection of the gradient; it vanishes
    exactly at the logit fixed points. tangent_hessian_max is the largest
    eigenvalue of the Hessian restricted to the block tangent space at x;
    negative everywhere means strict concavity along feasible directions.
    near_boundary flags evaluation points with coordinates below 1e-8, where
    the 1/x curvature terms start to dominate the conditioning.
    """

    value: float
    gradient: np.ndarray
    kkt_residual: float
    tangent_hessian_max: float
    form: str
    near_boundary: bool


def eval_potential(system: AffineLogitSystem, x: ProductPoint) -> PotentialEval:
    """Evaluate the potential, its gradient, and curvature data at interior x."""
    _require_symmetric(system)
    v = _interior_values(system, x)
    slices = system.block_slices
    inv_beta = 1.0 / system.beta_per_coord

    log_v = np.log(v)
    value = float(
        -np.sum(inv_beta * v * log_v) + 0.5 * float(v @ (system.W @ v)) + float(system.b @ v)
    )
    grad = -inv_beta * (1.0 + log_v) + system.W @ v + system.b

    hess = system.W - np.diag(inv_beta / v)
    Q = spectral.block_tangent_basis(system.block_dims)
    if Q.shape[1] == 0:
        hess_max = 0.0
    else:
        A = Q.T @ hess @ Q
        hess_max = float(np.linalg.eigvalsh(0.5 * (A + A.T))[-1])

    form = "phi" if system.n_blocks == 1 else "psi"
    if form == "phi":
        scale = system.beta[0]
        value *= scale
        grad = grad * scale
        hess_max *= scale
    kkt = float(np.linalg.norm(_block_project(grad, slices)))
    return PotentialEval(
        value=value,
        gradient=grad,
        kkt_residual=kkt,
        tangent_hessian_max=hess_max,
        form=form,
        near_boundary=bool(np.min(v) < _NEAR_BOUNDARY_FLAG),
    )


def tangent_hessian_quadform(system: AffineLogitSystem, x: ProductPoint, v) -> float:
    """Exact Hessian quadratic form along a blockwise zero-sum direction.

    In the Psi normalization this is
        -sum_a (1/beta_a) sum_i (v_i^a)^2 / x_i^a + v^T W v,
    and for a single block the Phi form (beta times the above) is returned,
    matching eval_potential.
    """
    _require_symmetric(system)
    xv = _interior_values(system, x)
    v = np.asarray(v, dtype=float)
    if v.shape != (system.n_total,):
        raise ValueError(f"direction has shape {v.shape}, expected ({system.n_total},)")
    if not np.all(np.isfinite(v)):
        raise ValueError("direction has non-finite entries")
    for sl in system.block_slices:
        s = float(np.sum(v[sl]))
        if abs(s) > 1e-12:
            raise ValueError(f"direction block sum {s:.3e} is not 0 within 1e-12")
    inv_beta = 1.0 / system.beta_per_coord
    quad = -float(np.sum(inv_beta * v * v / xv)) + float(v @ (system.W @ v))
    if system.n_blocks == 1:
        quad *= system.beta[0]
    return quad


def entropy_curvature_check(x: SimplexPoint, v: TangentVector) -> tuple:
    """Both sides of the tangent entropy curvature inequality at (x, v).

    Returns (sum_i v_i^2 / x_i, 2 ||v||^2); the left side is never smaller.
    Equality needs the mass of x split evenly over the support of v with v
    two-valued, the two-point least-curved transfer.
    """
    if x.n != v.n:
        raise ValueError(f"dimension mismatch: x has {x.n}, v has {v.n}")
    xv = x.values
    if float(np.min(xv)) < INTERIOR_ATOL:
        raise ValueError("curvature check needs an interior point")
    vv = v.values
    lhs = float(np.sum(vv * vv / xv))
    rhs = 2.0 * float(vv @ vv)
    return lhs, rhs


@dataclass(frozen=True)
class VariationalVerdict:
    """Analytic concavity certificate plus an empirical curvature probe.

    certified comes from the symmetric spectral condition alone; the probe
    (random interior points times random tangent directions) is diagnostic
    and cannot certify, only refute by exhibiting nonnegative curvature.
    """

    certified: bool
    kappa_scaled: float
    probe_max: float
    probe_all_negative: bool
    n_points: int
    n_directions: int


def variational_uniqueness(
    system: AffineLogitSystem,
    n_points: int = 256,
    n_directions: int = 16,
    seed: SeedSpec = SeedSpec(0),
) -> VariationalVerdict:
    """Combine the curvature certificate with a strict-concavity probe.

    Probe points are Dirichlet(1) draws nudged infinitesimally toward the
    uniform point so the interior guard is always met; directions are
    normalized blockwise-projected Gaussians.
    """
    _require_symmetric(system)
    sym = certify_symmetric(system)
    rng = make_rng(seed)
    dims = system.block_dims
    n = system.n_total
    probe_max = -np.inf
    for _ in range(n_points):
        parts = []
        for d in dims:
            e = rng.standard_exponential(d)
            p = e / np.sum(e)
            parts.append(p / np.sum(p))
        xv = np.concatenate(parts)
        xv = (1.0 - 1e-9) * xv + 1e-9 / np.repeat(dims, dims)
        x = ProductPoint.from_flat(xv, dims)
        for _ in range(n_directions):
            g = rng.standard_normal(n)
            v = _block_project(g, system.block_slices)
            nv = float(np.linalg.norm(v))
            if nv == 0.0:
                continue
            probe_max = max(probe_max, tangent_hessian_quadform(system, x, v / nv))
    return VariationalVerdict(
        certified=sym.check.passed,
        kappa_scaled=sym.kappa_scaled,
        probe_max=float(probe_max),
        probe_all_negative=bool(probe_max < 0.0),
        n_points=n_points,
        n_directions=n_directions,
    )
