"""Spectral utilities against dense linear-algebra oracles."""

import numpy as np
import pytest

from softmax_stability.instances import hadamard_separation, pitchfork_system
from softmax_stability.spectral import (
    block_tangent_basis,
    block_tangent_norm,
    l1_operator_norm,
    projection_matrix,
    spectral_norm,
    spectral_radius_nonneg,
    tangent_basis,
    tangent_lambda_max,
    tangent_operator_norm,
)
from softmax_stability.system import AffineLogitSystem

PITCHFORK_W = np.array([[0.0, -1.0], [-1.0, 0.0]])


class TestSpectralNorm:
    def test_identity(self):
        assert abs(spectral_norm(np.eye(5)) - 1.0) < 1e-12

    def test_diagonal_gives_max_abs(self):
        assert abs(spectral_norm(np.diag([3.0, -5.0])) - 5.0) < 1e-12

    def test_matches_dense_svd_oracle(self):
        rng = np.random.default_rng(101)
        for _ in range(20):
            M = rng.standard_normal((20, 20))
            oracle = float(np.linalg.svd(M, compute_uv=False)[0])
            assert abs(spectral_norm(M) - oracle) < 1e-9 * max(1.0, oracle)

    def test_transpose_symmetry(self):
        rng = np.random.default_rng(102)
        for shape in ((7, 7), (4, 9), (12, 3)):
            M = rng.standard_normal(shape)
            assert abs(spectral_norm(M) - spectral_norm(M.T)) < 1e-9

    def test_zero_matrix(self):
        assert spectral_norm(np.zeros((4, 6))) == 0.0

    def test_start_vector_traps(self):
        # all-ones is an exact eigenvector of the Gram matrix here, with a
        # *small* eigenvalue; without the jitter the iteration would stall
        # on the wrong branch
        n = 4
        W = np.eye(n) - 0.225 * np.ones((n, n))
        oracle = float(np.linalg.svd(W, compute_uv=False)[0])
        assert abs(spectral_norm(W) - oracle) < 1e-9
        # all-ones in the kernel (stagnant Rayleigh quotient)
        P = projection_matrix(3)
        assert abs(spectral_norm(P) - 1.0) < 1e-12

    def test_input_validation(self):
        with pytest.raises(ValueError):
            spectral_norm(np.array([[np.nan, 0.0], [0.0, 1.0]]))
        with pytest.raises(ValueError):
            spectral_norm(np.eye(3), tol=0.0)
        with pytest.raises(ValueError):
            spectral_norm(np.ones(3))


class TestTangentBases:
    def test_orthonormal_and_zero_sum(self):
        for n in (1, 2, 3, 8, 33):
            Q = tangent_basis(n)
            assert Q.shape == (n, n - 1)
            np.testing.assert_allclose(Q.T @ Q, np.eye(n - 1), atol=1e-12)
            np.testing.assert_allclose(Q.sum(axis=0), 0.0, atol=1e-12)

    def test_block_basis_shape(self):
        Q = block_tangent_basis((2, 3, 1))
        assert Q.shape == (6, 3)
        np.testing.assert_allclose(Q.T @ Q, np.eye(3), atol=1e-12)


class TestTangentOperatorNorm:
    def test_pitchfork_is_one(self):
        assert abs(tangent_operator_norm(PITCHFORK_W) - 1.0) < 1e-12

    def test_payoff_shift_is_invisible(self):
        rng = np.random.default_rng(111)
        a = rng.standard_normal(5)
        b = rng.standard_normal(5)
        W = np.outer(np.ones(5), a) + np.outer(b, np.ones(5))
        assert tangent_operator_norm(W) < 1e-12 * max(1.0, np.abs(W).max())

    def test_identity_value(self):
        # P I P = P acts as the identity on the tangent space
        assert abs(tangent_operator_norm(np.eye(3)) - 1.0) < 1e-9
        P = projection_matrix(3)
        assert abs(spectral_norm(P @ np.eye(3) @ P) - 1.0) < 1e-9

    def test_never_exceeds_ambient_norm(self):
        rng = np.random.default_rng(112)
        for _ in range(30):
            n = int(rng.integers(2, 15))
            W = rng.standard_normal((n, n))
            assert tangent_operator_norm(W) <= spectral_norm(W) + 1e-9

    def test_invariant_under_shifts(self):
        rng = np.random.default_rng(113)
        for _ in range(20):
            n = int(rng.integers(2, 12))
            W = rng.standard_normal((n, n))
            a = rng.standard_normal(n)
            b = rng.standard_normal(n)
            shifted = W + np.outer(np.ones(n), a) + np.outer(b, np.ones(n))
            assert abs(tangent_operator_norm(W) - tangent_operator_norm(shifted)) < 1e-9


class TestTangentLambdaMax:
    def test_pitchfork_kappa_is_one(self):
        assert abs(tangent_lambda_max(PITCHFORK_W) - 1.0) < 1e-12

    def test_negative_identity(self):
        # P(-I)P = -P: the ambient zero eigenvalue must not leak in
        assert abs(tangent_lambda_max(-np.eye(4)) - (-1.0)) < 1e-12

    def test_rayleigh_samples_never_exceed(self):
        rng = np.random.default_rng(121)
        W = rng.standard_normal((10, 10))
        W = 0.5 * (W + W.T)
        lam = tangent_lambda_max(W)
        best = -np.inf
        for _ in range(10_000):
            v = rng.standard_normal(10)
            v -= v.mean()
            v /= np.linalg.norm(v)
            r = float(v @ W @ v)
            assert r <= lam + 1e-3
            best = max(best, r)
        assert best <= lam + 1e-12

    def test_matches_ambient_eigensolve_when_positive(self):
        # for positive top tangent eigenvalue, the ambient top eigenvalue of
        # P W P coincides with it (independent construction path)
        rng = np.random.default_rng(122)
        for _ in range(20):
            n = int(rng.integers(3, 12))
            W = rng.standard_normal((n, n))
            W = 0.5 * (W + W.T) + 2.0 * np.eye(n)
            P = projection_matrix(n)
            ambient_top = float(np.linalg.eigvalsh(P @ W @ P)[-1])
            assert abs(tangent_lambda_max(W) - ambient_top) < 1e-10

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError, match="symmetric"):
            tangent_lambda_max(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_bounded_by_operator_norm(self):
        rng = np.random.default_rng(123)
        for _ in range(20):
            n = int(rng.integers(2, 12))
            W = rng.standard_normal((n, n))
            W = 0.5 * (W + W.T)
            assert tangent_lambda_max(W) <= tangent_operator_norm(W) + 1e-9


class TestBlockTangentNorm:
    def test_hadamard_norm_is_alpha(self):
        system = hadamard_separation(4, 1.0)
        assert abs(block_tangent_norm(system) - 1.0) < 1e-9
        assert abs(block_tangent_norm(system, scaled=True) - 1.0) < 1e-9

    def test_single_block_reduction(self):
        system = pitchfork_system(1.7)
        unscaled = block_tangent_norm(system)
        scaled = block_tangent_norm(system, scaled=True)
        assert abs(unscaled - tangent_operator_norm(system.W)) < 1e-12
        assert abs(scaled - 1.7 * unscaled) < 1e-12

    def test_independent_blocks_take_max(self):
        W = np.zeros((4, 4))
        W[:2, :2] = PITCHFORK_W
        W[2:, 2:] = PITCHFORK_W
        system = AffineLogitSystem((2, 2), W, np.zeros(4), (1.0, 3.0))
        assert abs(block_tangent_norm(system, scaled=True) - 3.0) < 1e-9
        # oracle: scaled block-diagonal norm via dense svd
        from softmax_stability.spectral import block_projection_matrix

        P = block_projection_matrix((2, 2))
        M = np.repeat([1.0, 3.0], 2)[:, None] * (P @ W @ P)
        oracle = float(np.linalg.svd(M, compute_uv=False)[0])
        assert abs(block_tangent_norm(system, scaled=True) - oracle) < 1e-9


class TestL1NormAndSpectralRadius:
    def test_rank_one_tangent_block(self):
        u = np.array([1.0, -1.0]) / np.sqrt(2.0)
        assert abs(l1_operator_norm(np.outer(u, u)) - 1.0) < 1e-12

    def test_all_ones_radius(self):
        for m, c in ((3, 2.0), (5, 0.25)):
            assert abs(spectral_radius_nonneg(c * np.ones((m, m))) - m * c) < 1e-9

    def test_hadamard_influence_radius(self):
        # influence entries alpha/(2 sqrt(m)) everywhere -> radius sqrt(m)/2
        m = 8
        C = np.full((m, m), 1.0 / (2.0 * np.sqrt(m)))
        assert abs(spectral_radius_nonneg(C) - np.sqrt(m) / 2.0) < 1e-9

    def test_nilpotent_is_zero(self):
        C = np.triu(np.ones((5, 5)), k=1)
        assert spectral_radius_nonneg(C) == 0.0

    def test_rejects_negative_entries(self):
        with pytest.raises(ValueError, match="nonnegative"):
            spectral_radius_nonneg(np.array([[0.5, -0.1], [0.0, 0.5]]))

    def test_defective_and_periodic_fallback(self):
        assert abs(spectral_radius_nonneg(np.array([[0.0, 2.0], [1.0, 0.0]])) - np.sqrt(2.0)) < 1e-9
        assert abs(spectral_radius_nonneg(np.array([[1.0, 1.0], [0.0, 1.0]])) - 1.0) < 1e-9
