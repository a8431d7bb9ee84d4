"""Named systems and generators: pitchfork, Hadamard blocks, random families.

All randomness flows through SeedSpec, a (seed, stream) pair keying a
counter-based Philox generator, so identical specs reproduce identical
instances bit for bit within a build. Generators are pure; batch generation
can parallelize by handing each worker its own stream id.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ProductPoint, SimplexPoint
from .system import AffineLogitSystem

RANDOM_KINDS = ("gaussian", "gaussian_symmetric", "shifted", "shifted_symmetric")

# Shift components default to 3x the base entry scale, large enough that the
# ambient-versus-tangent gap dominates the plain factor two.
DEFAULT_SHIFT_FACTOR = 3.0


@dataclass(frozen=True)
class SeedSpec:
    """Deterministic RNG address: 64-bit seed plus a stream id."""

    seed: int
    stream: int = 0

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if not 0 <= int(self.stream) < 2**64:
            raise ValueError("stream must fit in an unsigned 64-bit integer")


def make_rng(spec: SeedSpec) -> np.random.Generator:
    """Counter-based generator keyed directly by (seed, stream)."""
    return np.random.Generator(np.random.Philox(key=[int(spec.seed), int(spec.stream)]))


def pitchfork_system(beta: float) -> AffineLogitSystem:
    """The two-action system with mutual inhibition W = [[0,-1],[-1,0]], b = 0.

    Its tangent space is the span of (1,-1), on which W acts as the
    identity, so the tangent interaction norm is exactly one: the ambient
    certificate stops at beta < 1 while the tangent certificate reaches the
    true bifurcation at beta = 2.
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    W = np.array([[0.0, -1.0], [-1.0, 0.0]])
    return AffineLogitSystem(block_dims=(2,), W=W, b=np.zeros(2), beta=(float(beta),))


def _imbalance_rhs(beta: float, m: float) -> float:
    return float(np.tanh(0.5 * beta * m))


def solve_pitchfork(beta: float, tol: float = 1e-12):
    """Fixed points of m = tanh(beta m / 2) on [-1, 1] with stability labels.

    m = 0 is always a fixed point. For beta > 2 the unique positive root is
    bracketed in (1e-15, 1) and found by bisection; tanh(a m)/m is strictly
    decreasing in m so the bracket contains exactly one sign change.
    Stability follows the sign of g'(m) = (beta/2) sech^2(beta m / 2) - 1;
    at beta <= 2 the single root is globally attracting and labeled stable
    even where the linear rate degenerates to zero.

    Returns a list of (m, label) pairs sorted by m, label in
    {"stable", "unstable"}.
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    if tol <= 0.0:
        raise ValueError("tol must be positive")

    def g(m: float) -> float:
        return _imbalance_rhs(beta, m) - m

    def g_prime(m: float) -> float:
        c = np.cosh(0.5 * beta * m)
        return float(0.5 * beta / (c * c) - 1.0)

    if beta <= 2.0:
        return [(0.0, "stable")]

    lo, hi = 1e-15, 1.0
    width_tol = 0.25 * tol
    for _ in range(200):
        if hi - lo <= width_tol:
            break
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    pos_label = "stable" if g_prime(root) < 0.0 else "unstable"
    return [(-root, pos_label), (0.0, "unstable"), (root, pos_label)]


@dataclass(frozen=True)
class PitchforkDiagram:
    """Fixed points of the two-action imbalance equation over a beta grid.

    points[i] is the solve_pitchfork output for beta_grid[i]: one stable
    root below the transition, a symmetric stable pair plus the unstable
    origin above it.
    """

    beta_grid: tuple
    points: tuple


def pitchfork_diagram(beta_grid, tol: float = 1e-12) -> PitchforkDiagram:
    grid = tuple(float(b) for b in beta_grid)
    return PitchforkDiagram(
        beta_grid=grid,
        points=tuple(tuple(solve_pitchfork(b, tol)) for b in grid),
    )


def sylvester_hadamard(m: int) -> np.ndarray:
    """The +-1 Hadamard matrix of power-of-two order m by doubling."""
    if m < 1 or (m & (m - 1)) != 0:
        raise ValueError(f"Hadamard order must be a power of two, got {m}")
    H = np.ones((1, 1))
    while H.shape[0] < m:
        H = np.block([[H, H], [H, -H]])
    return H


def hadamard_separation(m: int, alpha: float) -> AffineLogitSystem:
    """Signed orthogonal block couplings: m binary blocks, unit temperatures.

    Block (a, b) carries (alpha / sqrt(m)) H_ab u u^T with u = (1,-1)/sqrt(2).
    In the tangent basis the interaction is alpha times an orthogonal matrix,
    so the Euclidean tangent norm stays alpha for every m, while the absolute
    block influence radius grows like alpha sqrt(m) / 2: signed cancellation
    that l1-style influence accounting cannot see.
    """
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    H = sylvester_hadamard(m)
    u = np.array([1.0, -1.0]) / np.sqrt(2.0)
    uu = np.outer(u, u)
    W = np.kron((alpha / np.sqrt(m)) * H, uu)
    dims = (2,) * m
    return AffineLogitSystem(block_dims=dims, W=W, b=np.zeros(2 * m), beta=(1.0,) * m)


def upper_triangular_counterexample(m: int, c: float) -> AffineLogitSystem:
    """Feed-forward block influences: W^{ab} = c u u^T for a < b, else zero.

    The influence matrix is strictly upper triangular, hence nilpotent with
    spectral radius zero, while the Euclidean tangent norm grows with c.
    """
    if m < 2:
        raise ValueError("need at least 2 blocks")
    if c <= 0.0:
        raise ValueError("c must be positive")
    u = np.array([1.0, -1.0]) / np.sqrt(2.0)
    uu = np.outer(u, u)
    T = np.triu(np.ones((m, m)), k=1)
    W = np.kron(c * T, uu)
    dims = (2,) * m
    return AffineLogitSystem(block_dims=dims, W=W, b=np.zeros(2 * m), beta=(1.0,) * m)


def random_instance(
    kind: str,
    n: int,
    seed: SeedSpec,
    scale: float = 1.0,
    shift_factor: float = DEFAULT_SHIFT_FACTOR,
    bias_scale: float = 1.0,
    beta: float = 1.0,
) -> AffineLogitSystem:
    """A single-block system with random interactions of the given kind.

    gaussian: i.i.d. Normal(0, scale^2) entries. gaussian_symmetric: the
    same, symmetrized as (M + M^T)/2. shifted / shifted_symmetric: add
    payoff-shift components 1 a^T + b 1^T (a = b for the symmetric variant)
    with entries Normal(0, (shift_factor*scale)^2); these inflate the
    ambient norm but are invisible to the tangent interaction. Biases are
    i.i.d. Normal(0, bias_scale^2). Draw order is fixed (base matrix, shift
    vectors, bias) so instances are reproducible bit for bit.
    """
    if kind not in RANDOM_KINDS:
        raise ValueError(f"kind must be one of {RANDOM_KINDS}, got {kind!r}")
    if n < 2:
        raise ValueError("need n >= 2")
    rng = make_rng(seed)
    G = rng.standard_normal((n, n)) * scale
    if kind.endswith("symmetric"):
        G = 0.5 * (G + G.T)
    W = G
    if kind.startswith("shifted"):
        ones = np.ones(n)
        a = rng.standard_normal(n) * (shift_factor * scale)
        if kind.endswith("symmetric"):
            W = G + np.outer(ones, a) + np.outer(a, ones)
        else:
            bshift = rng.standard_normal(n) * (shift_factor * scale)
            W = G + np.outer(ones, a) + np.outer(bshift, ones)
    bias = rng.standard_normal(n) * bias_scale
    return AffineLogitSystem(block_dims=(n,), W=W, b=bias, beta=(float(beta),))


def dirichlet_start(dims, seed: SeedSpec) -> ProductPoint:
    """Per-block Dirichlet(1,...,1) point via normalized exponentials."""
    dims = tuple(int(d) for d in dims)
    if len(dims) == 0 or min(dims) < 1:
        raise ValueError("block dims must be a nonempty list of positive ints")
    rng = make_rng(seed)
    blocks = []
    for d in dims:
        e = rng.standard_exponential(d)
        p = e / np.sum(e)
        blocks.append(SimplexPoint(p / np.sum(p)))
    return ProductPoint(tuple(blocks))
