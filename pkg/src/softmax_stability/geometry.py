"""Simplex geometry: feasible states, tangent directions, softmax, covariance.

States live on a probability simplex or a finite product of simplices.
Tangent directions are the zero-sum vectors, the only feasible perturbations
of a probability vector. All feasibility checks use an absolute tolerance of
1e-12 and reject violating inputs instead of repairing them; ``normalize`` is
the single explicit repair entry point for ingesting raw user data.

Every function here is pure and all value types are immutable, so the module
is safe to use from any number of threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FEASIBILITY_ATOL = 1e-12


def _as_vector(values, name: str) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"{name} must be a 1-d vector, got shape {v.shape}")
    if v.size == 0:
        raise ValueError(f"{name} must be nonempty")
    return v


def _freeze(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    v.flags.writeable = False
    return v


@dataclass(frozen=True)
class SimplexPoint:
    """A probability vector: nonnegative entries summing to 1 within 1e-12."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = _as_vector(self.values, "simplex point")
        if not np.all(np.isfinite(v)):
            raise ValueError("simplex point has non-finite entries")
        lo = float(np.min(v))
        if lo < 0.0:
            raise ValueError(f"simplex point has negative entry {lo:.6e}")
        s = float(np.sum(v))
        if abs(s - 1.0) > FEASIBILITY_ATOL:
            raise ValueError(
                f"simplex point sums to {s:.17g}, not 1 within {FEASIBILITY_ATOL}"
            )
        object.__setattr__(self, "values", _freeze(v))

    @property
    def n(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class TangentVector:
    """A zero-sum direction: the feasible perturbations of a simplex point."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = _as_vector(self.values, "tangent vector")
        if not np.all(np.isfinite(v)):
            raise ValueError("tangent vector has non-finite entries")
        s = float(np.sum(v))
        if abs(s) > FEASIBILITY_ATOL:
            raise ValueError(
                f"tangent vector sums to {s:.17g}, not 0 within {FEASIBILITY_ATOL}"
            )
        object.__setattr__(self, "values", _freeze(v))

    @property
    def n(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class ProductPoint:
    """A point on a product of simplices, one SimplexPoint per block."""

    blocks: tuple

    def __post_init__(self) -> None:
        blocks = tuple(self.blocks)
        if len(blocks) == 0:
            raise ValueError("product point needs at least one block")
        for blk in blocks:
            if not isinstance(blk, SimplexPoint):
                raise ValueError("product point blocks must be SimplexPoint values")
        object.__setattr__(self, "blocks", blocks)

    @property
    def dims(self) -> tuple:
        return tuple(blk.n for blk in self.blocks)

    @property
    def n_total(self) -> int:
        return sum(self.dims)

    def flat(self) -> np.ndarray:
        """Concatenation of the block vectors, in block order."""
        return np.concatenate([blk.values for blk in self.blocks])

    @classmethod
    def from_flat(cls, values, dims) -> "ProductPoint":
        v = _as_vector(values, "product point")
        dims = tuple(int(d) for d in dims)
        if v.size != sum(dims):
            raise ValueError(
                f"product point has {v.size} coordinates, block dims {dims} need {sum(dims)}"
            )
        blocks = []
        off = 0
        for d in dims:
            blocks.append(SimplexPoint(v[off : off + d]))
            off += d
        return cls(tuple(blocks))


def project_tangent(v) -> TangentVector:
    """Orthogonally project a vector onto the zero-sum tangent space.

    Returns v - mean(v) * 1. The mean is removed twice so the residual
    coordinate sum of the output is at roundoff-squared level, keeping the
    TangentVector invariant valid even for large-magnitude inputs.
    """
    v = _as_vector(v, "vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("cannot project a vector with non-finite entries")
    w = v - v.mean()
    w = w - w.mean()
    return TangentVector(w)


def softmax_values(z: np.ndarray) -> np.ndarray:
    """Softmax as a plain array function; no input validation.

    Fast path for iterative callers. Uses max-subtraction, which is exact in
    the mathematics (softmax is invariant under adding a constant) and makes
    the evaluation overflow-safe for any finite input.
    """
    e = np.exp(z - np.max(z))
    p = e / np.sum(e)
    return p / np.sum(p)


def softmax(z) -> SimplexPoint:
    """Map a finite score vector to the simplex via exp and normalization."""
    z = _as_vector(z, "softmax input")
    if not np.all(np.isfinite(z)):
        raise ValueError("softmax input has non-finite entries")
    return SimplexPoint(softmax_values(z))


def softmax_covariance(p: SimplexPoint) -> np.ndarray:
    """Covariance matrix diag(p) - p p^T of the categorical distribution p.

    This matrix is also the Jacobian of softmax at any score vector mapping
    to p. It annihilates the all-ones direction, is positive semidefinite,
    and its quadratic form v^T S v equals the variance of the coordinates of
    v under p. Its spectral norm is at most 1/2 for every p.
    """
    pv = p.values
    return np.diag(pv) - np.outer(pv, pv)


def normalize(v) -> SimplexPoint:
    """Repair a raw vector into a simplex point: clamp negatives, rescale.

    This is never applied implicitly anywhere in the library; call it
    deliberately when ingesting data that is only approximately feasible.
    """
    v = _as_vector(v, "vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("cannot normalize a vector with non-finite entries")
    w = np.clip(v, 0.0, None)
    s = float(np.sum(w))
    if s <= 0.0:
        raise ValueError("vector has no positive mass to normalize")
    w = w / s
    return SimplexPoint(w / np.sum(w))
