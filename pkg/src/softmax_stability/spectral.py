"""Dense spectral utilities for small matrices.

Euclidean operator norms (also restricted to tangent subspaces), extreme
eigenvalues of symmetric operators on tangent subspaces, l1 operator norms,
and spectral radii of entrywise nonnegative matrices. Everything is dense and
aimed at dimensions up to a few hundred; there are no sparse or large-scale
code paths.

The primary algorithm for norms is deterministic power iteration on the Gram
matrix, with a dense symmetric eigensolve as convergence fallback. The dense
eigensolve is also what the test suite uses as the independent oracle.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .system import AffineLogitSystem

DEFAULT_TOL = 1e-10

# Max dimension for the dense eigensolve fallback; matches the desk-scale
# design target of the whole library.
_DENSE_FALLBACK_MAX_DIM = 512

# Arbitrary fixed key for the start-vector jitter stream. Never reseeded, so
# spectral_norm is bit-for-bit deterministic.
_JITTER_KEY = (0x9E3779B97F4A7C15, 0xD1B54A32D192ED03)


def _jitter_vector(d: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(key=_JITTER_KEY))
    u = rng.standard_normal(d)
    return u / np.linalg.norm(u)


def _check_matrix(M, name: str = "matrix") -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.size == 0:
        raise ValueError(f"{name} must be a nonempty 2-d array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def spectral_norm(M, tol: float = DEFAULT_TOL) -> float:
    """Largest singular value of M to relative accuracy tol.

    Power iteration on the Gram matrix of the smaller side, started from the
    normalized all-ones vector. If that start is already (numerically) an
    eigenvector of the Gram matrix, including the stagnant case where the
    initial Rayleigh quotient is zero, it is perturbed by a fixed
    pseudorandom jitter; otherwise the iteration could silently settle on a
    non-dominant eigenvalue. Capped at 10*rows*cols iterations, after which
    a dense symmetric eigensolve takes over (dimension <= 512).
    """
    M = _check_matrix(M)
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    r, c = M.shape
    G = M.T @ M if c <= r else M @ M.T
    G = 0.5 * (G + G.T)
    d = G.shape[0]
    scale = float(np.trace(G)) / d  # mean eigenvalue of the PSD Gram matrix
    if scale <= 0.0:
        return 0.0

    v = np.ones(d) / np.sqrt(d)
    w = G @ v
    if np.linalg.norm(w - (v @ w) * v) <= 1e-8 * scale:
        v = v + 1e-6 * _jitter_vector(d)
        v = v / np.linalg.norm(v)

    # The Rayleigh quotient of power iterates on a PSD matrix is
    # nondecreasing; stop once its increments are far below the requested
    # accuracy (factor 100 guards against slow convergence near-misses).
    stop = 0.01 * tol
    lam_prev = -np.inf
    max_iter = 10 * r * c
    for _ in range(max_iter):
        w = G @ v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            v = _jitter_vector(d)
            lam_prev = -np.inf
            continue
        lam = float(v @ w)
        v = w / nw
        if abs(lam - lam_prev) <= stop * max(abs(lam), 1e-3 * scale):
            return float(np.sqrt(max(lam, 0.0)))
        lam_prev = lam

    if d > _DENSE_FALLBACK_MAX_DIM:
        raise ArithmeticError(
            f"power iteration did not converge and dimension {d} exceeds the "
            f"dense fallback limit {_DENSE_FALLBACK_MAX_DIM}"
        )
    try:
        eigs = np.linalg.eigvalsh(G)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise ArithmeticError(f"dense eigensolve fallback failed: {exc}") from exc
    top = float(eigs[-1])
    if not np.isfinite(top):  # pragma: no cover
        raise ArithmeticError("dense eigensolve fallback produced non-finite result")
    return float(np.sqrt(max(top, 0.0)))


def projection_matrix(n: int) -> np.ndarray:
    """Orthogonal projection I - (1/n) 1 1^T onto the zero-sum subspace."""
    if n < 1:
        raise ValueError("projection needs dimension >= 1")
    return np.eye(n) - np.full((n, n), 1.0 / n)


def block_projection_matrix(dims) -> np.ndarray:
    """Block-diagonal tangent projection for the given block dimensions."""
    dims = tuple(int(d) for d in dims)
    if len(dims) == 0 or min(dims) < 1:
        raise ValueError("block dims must be a nonempty list of positive ints")
    n = sum(dims)
    P = np.zeros((n, n))
    off = 0
    for d in dims:
        P[off : off + d, off : off + d] = projection_matrix(d)
        off += d
    return P


def tangent_basis(n: int) -> np.ndarray:
    """Orthonormal basis of the zero-sum subspace, as an n x (n-1) matrix.

    Built from the Householder reflection sending e_1 to 1/sqrt(n): its
    remaining columns span the orthogonal complement of the ones direction.
    Deflating against 1/sqrt(n) this way avoids any eigenvalue thresholding
    when restricting operators to the tangent space.
    """
    if n < 1:
        raise ValueError("tangent basis needs dimension >= 1")
    if n == 1:
        return np.zeros((1, 0))
    u = np.ones(n) / np.sqrt(n)
    w = u.copy()
    w[0] -= 1.0
    H = np.eye(n) - 2.0 * np.outer(w, w) / float(w @ w)
    return H[:, 1:]


def block_tangent_basis(dims) -> np.ndarray:
    """Block-diagonal orthonormal tangent basis, shape N x (N - m)."""
    dims = tuple(int(d) for d in dims)
    if len(dims) == 0 or min(dims) < 1:
        raise ValueError("block dims must be a nonempty list of positive ints")
    n = sum(dims)
    cols = n - len(dims)
    Q = np.zeros((n, cols))
    roff = 0
    coff = 0
    for d in dims:
        Q[roff : roff + d, coff : coff + d - 1] = tangent_basis(d)
        roff += d
        coff += d - 1
    return Q


def tangent_operator_norm(W, tol: float = DEFAULT_TOL) -> float:
    """Euclidean norm of P W P restricted to the zero-sum tangent space.

    Computed as the ambient spectral norm of P W P, which is valid because
    P W P annihilates the orthogonal complement of the tangent space.
    """
    W = _check_matrix(W, "interaction matrix")
    n, m = W.shape
    if n != m:
        raise ValueError(f"interaction matrix must be square, got {W.shape}")
    P = projection_matrix(n)
    return spectral_norm(P @ W @ P, tol)


def tangent_lambda_max(W) -> float:
    """Largest eigenvalue of P W P restricted to the tangent space.

    Requires W symmetric to 1e-10 (max absolute entry of W - W^T). The
    operator is restricted to an explicit orthonormal tangent basis before
    the eigensolve, so the spurious ambient zero eigenvalue on the ones
    direction never enters; in particular negative-definite tangent
    operators report a negative maximum.
    """
    W = _check_matrix(W, "interaction matrix")
    n, m = W.shape
    if n != m:
        raise ValueError(f"interaction matrix must be square, got {W.shape}")
    asym = float(np.max(np.abs(W - W.T))) if n > 0 else 0.0
    if asym > 1e-10:
        raise ValueError(f"matrix is not symmetric: max |W - W^T| = {asym:.3e}")
    if n == 1:
        return 0.0
    Ws = 0.5 * (W + W.T)
    Q = tangent_basis(n)
    A = Q.T @ Ws @ Q
    return float(np.linalg.eigvalsh(0.5 * (A + A.T))[-1])


def block_tangent_norm(system: "AffineLogitSystem", scaled: bool = False, tol: float = DEFAULT_TOL) -> float:
    """Norm of P W P (or B_beta P W P when scaled) on the block tangent space.

    P is the block-diagonal tangent projection and B_beta the block-scalar
    matrix of inverse temperatures. The ambient spectral norm is used, valid
    because the projected operator annihilates the block ones directions and
    maps into the block tangent space.
    """
    P = block_projection_matrix(system.block_dims)
    M = P @ system.W @ P
    if scaled:
        M = system.beta_per_coord[:, None] * M
    return spectral_norm(M, tol)


def l1_operator_norm(M) -> float:
    """Operator norm for the l1 -> l1 geometry: max column absolute sum."""
    M = _check_matrix(M)
    return float(np.max(np.sum(np.abs(M), axis=0)))


def spectral_radius_nonneg(C, tol: float = DEFAULT_TOL) -> float:
    """Spectral radius of an entrywise nonnegative square matrix.

    Power iteration from the all-ones vector; by Perron-Frobenius the iterate
    ratios converge to the radius for a nonnegative matrix, and nilpotent
    (e.g. strictly triangular) influence patterns reach exactly zero. Falls
    back to a dense eigensolve if the iteration is slow (defective dominant
    eigenvalue).
    """
    C = _check_matrix(C, "influence matrix")
    n, m = C.shape
    if n != m:
        raise ValueError(f"influence matrix must be square, got {C.shape}")
    if float(np.min(C)) < 0.0:
        raise ValueError("influence matrix must be entrywise nonnegative")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    scale = float(np.max(C))
    if scale == 0.0:
        return 0.0

    v = np.ones(n)
    v /= np.linalg.norm(v)
    lam_prev = -np.inf
    for _ in range(10 * n * n + n):
        w = C @ v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0
        lam = nw
        v = w / nw
        if abs(lam - lam_prev) <= 0.01 * tol * max(lam, 1e-3 * scale):
            return float(lam)
        lam_prev = lam

    if n > _DENSE_FALLBACK_MAX_DIM:
        raise ArithmeticError(
            f"spectral radius iteration did not converge for dimension {n}"
        )
    eigs = np.linalg.eigvals(C)
    return float(np.max(np.abs(eigs)))
