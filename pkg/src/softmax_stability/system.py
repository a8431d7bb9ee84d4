"""The model object: affine block logit systems and their response map.

An AffineLogitSystem couples m simplex blocks through a single flat N x N
interaction matrix W (block structure recovered by index ranges), an N-bias
b, and one inverse temperature per block. The response map applies, block by
block, a softmax at temperature beta_a to the affine payoff b + W x.

Systems are immutable after construction and every operation here is a pure
function of its arguments.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import spectral
from .geometry import ProductPoint, SimplexPoint, softmax_values

_SYMMETRY_ATOL = 1e-10


@dataclass(frozen=True)
class AffineLogitSystem:
    """Block logit system x^a -> softmax(beta_a * (b + W x)^a)."""

    block_dims: tuple
    W: np.ndarray
    b: np.ndarray
    beta: tuple

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.block_dims)
        if len(dims) == 0 or min(dims) < 1:
            raise ValueError(f"block dims must be positive, got {dims}")
        n = sum(dims)
        W = np.asarray(self.W, dtype=float)
        if W.shape != (n, n):
            raise ValueError(f"W has shape {W.shape}, expected ({n}, {n}) for dims {dims}")
        b = np.asarray(self.b, dtype=float)
        if b.shape != (n,):
            raise ValueError(f"b has shape {b.shape}, expected ({n},)")
        beta = tuple(float(t) for t in self.beta)
        if len(beta) != len(dims):
            raise ValueError(
                f"{len(beta)} inverse temperatures for {len(dims)} blocks"
            )
        if not np.all(np.isfinite(W)) or not np.all(np.isfinite(b)):
            raise ValueError("system has non-finite entries")
        if any(not np.isfinite(t) or t <= 0.0 for t in beta):
            raise ValueError(f"inverse temperatures must be positive, got {beta}")
        W = W.copy()
        W.flags.writeable = False
        b = b.copy()
        b.flags.writeable = False
        object.__setattr__(self, "block_dims", dims)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "beta", beta)

    @property
    def n_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def n_total(self) -> int:
        return sum(self.block_dims)

    @property
    def block_slices(self) -> tuple:
        out = []
        off = 0
        for d in self.block_dims:
            out.append(slice(off, off + d))
            off += d
        return tuple(out)

    @property
    def beta_per_coord(self) -> np.ndarray:
        """The diagonal of B_beta: beta_a repeated over the coordinates of block a."""
        return np.repeat(np.asarray(self.beta, dtype=float), self.block_dims)

    def is_symmetric(self, atol: float = _SYMMETRY_ATOL) -> bool:
        return float(np.max(np.abs(self.W - self.W.T))) <= atol

    def has_uniform_beta(self) -> bool:
        return max(self.beta) - min(self.beta) == 0.0

    def to_dict(self) -> dict:
        return {
            "block_dims": list(self.block_dims),
            "beta": list(self.beta),
            "W": [[float(x) for x in row] for row in self.W],
            "b": [float(x) for x in self.b],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AffineLogitSystem":
        if not isinstance(data, dict):
            raise ValueError("system JSON must be an object")
        missing = [k for k in ("block_dims", "beta", "W", "b") if k not in data]
        if missing:
            raise ValueError(f"system JSON missing fields: {', '.join(missing)}")
        return cls(
            block_dims=tuple(data["block_dims"]),
            W=np.asarray(data["W"], dtype=float),
            b=np.asarray(data["b"], dtype=float),
            beta=tuple(data["beta"]),
        )


def load_system(path) -> AffineLogitSystem:
    """Read a system from a JSON file; parse errors report line and column."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(
                f"parse error in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
    try:
        return AffineLogitSystem.from_dict(data)
    except ValueError as exc:
        raise ValueError(f"invalid system in {path}: {exc}") from exc


def save_system(system: AffineLogitSystem, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(system.to_dict(), fh, indent=2)
        fh.write("\n")


def response_batch(system: AffineLogitSystem, X: np.ndarray) -> np.ndarray:
    """Response map applied to each row of X; no feasibility validation.

    Vectorized fast path for dynamics and sampling loops. Each row is mapped
    to softmax(beta_a * (b + W x)^a) per block, with rowwise max-subtraction
    inside every block for overflow safety.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Z = (X @ system.W.T + system.b) * system.beta_per_coord
    out = np.empty_like(Z)
    for sl in system.block_slices:
        zb = Z[:, sl]
        e = np.exp(zb - np.max(zb, axis=1, keepdims=True))
        p = e / np.sum(e, axis=1, keepdims=True)
        out[:, sl] = p / np.sum(p, axis=1, keepdims=True)
    return out


def response_values(system: AffineLogitSystem, x: np.ndarray) -> np.ndarray:
    """Response map on a flat coordinate vector; no feasibility validation."""
    return response_batch(system, x[None, :])[0]


def response(system: AffineLogitSystem, x: ProductPoint) -> ProductPoint:
    """One application of the block logit response map to a feasible point."""
    if x.dims != system.block_dims:
        raise ValueError(f"point dims {x.dims} do not match system dims {system.block_dims}")
    z = system.beta_per_coord * (system.b + system.W @ x.flat())
    blocks = tuple(SimplexPoint(softmax_values(z[sl])) for sl in system.block_slices)
    return ProductPoint(blocks)


def response_jacobian(system: AffineLogitSystem, x: ProductPoint) -> np.ndarray:
    """Jacobian of the response map at x: blockdiag(Sigma_a) B_beta W.

    Sigma_a is the softmax covariance of the block-a response at x. Every
    block row-group of the result sums to zero, because each covariance block
    annihilates its all-ones direction.
    """
    if x.dims != system.block_dims:
        raise ValueError(f"point dims {x.dims} do not match system dims {system.block_dims}")
    p = response_values(system, x.flat())
    BW = system.beta_per_coord[:, None] * system.W
    J = np.empty_like(BW)
    for sl in system.block_slices:
        pa = p[sl]
        cov = np.diag(pa) - np.outer(pa, pa)
        J[sl, :] = cov @ BW[sl, :]
    return J


@dataclass(frozen=True)
class SymmetryTag:
    """Whether W equals its transpose to within 1e-10, entrywise."""

    is_symmetric: bool


@dataclass(frozen=True)
class SystemDiagnostics:
    """Validation report: symmetry, block structure, payoff-shift content.

    The four component norms split W by the block tangent projection P on
    both sides; everything outside the tangent-tangent part is invisible to
    the response map (payoff shifts and infeasible input directions).
    """

    symmetry: SymmetryTag
    block_dims: tuple
    beta: tuple
    n_total: int
    component_norms: dict
    has_payoff_shift: bool


def validate(system: AffineLogitSystem) -> SystemDiagnostics:
    """Check invariants and report structure; never raises on a built system."""
    P = spectral.block_projection_matrix(system.block_dims)
    n = system.n_total
    R = np.eye(n) - P
    comps = {
        "tangent_tangent": spectral.spectral_norm(P @ system.W @ P),
        "tangent_const": spectral.spectral_norm(P @ system.W @ R),
        "const_tangent": spectral.spectral_norm(R @ system.W @ P),
        "const_const": spectral.spectral_norm(R @ system.W @ R),
    }
    scale = max(1.0, float(np.max(np.abs(system.W))))
    shift = any(
        comps[k] > 1e-12 * scale for k in ("tangent_const", "const_tangent", "const_const")
    )
    return SystemDiagnostics(
        symmetry=SymmetryTag(is_symmetric=system.is_symmetric()),
        block_dims=system.block_dims,
        beta=system.beta,
        n_total=n,
        component_norms=comps,
        has_payoff_shift=shift,
    )
