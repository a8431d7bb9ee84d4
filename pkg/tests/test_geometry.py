"""Simplex types, tangent projection, softmax, and its covariance matrix."""

import numpy as np
import pytest

from softmax_stability.geometry import (
    ProductPoint,
    SimplexPoint,
    TangentVector,
    normalize,
    project_tangent,
    softmax,
    softmax_covariance,
)


class TestSimplexPoint:
    def test_accepts_feasible(self):
        p = SimplexPoint([0.2, 0.3, 0.5])
        assert p.n == 3
        assert not p.values.flags.writeable

    def test_rejects_negative(self):
        with pytest.raises(ValueError, match="negative"):
            SimplexPoint([1.1, -0.1])

    def test_rejects_bad_sum(self):
        with pytest.raises(ValueError, match="sums to"):
            SimplexPoint([0.5, 0.5 + 1e-9])

    def test_rejects_nan_and_empty(self):
        with pytest.raises(ValueError):
            SimplexPoint([np.nan, 1.0])
        with pytest.raises(ValueError):
            SimplexPoint([])

    def test_tolerance_is_absolute_1e12(self):
        SimplexPoint([0.5, 0.5 + 9e-13])  # inside tolerance
        with pytest.raises(ValueError):
            SimplexPoint([0.5, 0.5 + 2e-12])


class TestTangentVector:
    def test_zero_sum_ok(self):
        TangentVector([1.0, -0.25, -0.75])

    def test_rejects_nonzero_sum(self):
        with pytest.raises(ValueError, match="sums to"):
            TangentVector([1.0, -0.9])


class TestProductPoint:
    def test_flat_roundtrip(self):
        x = ProductPoint.from_flat([0.5, 0.5, 0.2, 0.3, 0.5], (2, 3))
        assert x.dims == (2, 3)
        assert x.n_total == 5
        np.testing.assert_array_equal(x.flat(), [0.5, 0.5, 0.2, 0.3, 0.5])

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError, match="coordinates"):
            ProductPoint.from_flat([0.5, 0.5, 1.0], (2, 2))

    def test_rejects_infeasible_block(self):
        with pytest.raises(ValueError):
            ProductPoint.from_flat([0.6, 0.5, 1.0], (2, 1))


class TestProjectTangent:
    def test_constant_vectors_annihilated(self):
        for n in (1, 2, 7):
            v = project_tangent(np.full(n, 3.7))
            np.testing.assert_allclose(v.values, 0.0, atol=1e-15)

    def test_zero_sum_fixed(self):
        v = project_tangent([1.0, -1.0])
        np.testing.assert_array_equal(v.values, [1.0, -1.0])

    def test_mean_subtraction(self):
        v = project_tangent([3.0, 1.0, 2.0])
        np.testing.assert_allclose(v.values, [1.0, -1.0, 0.0], atol=1e-15)

    def test_idempotent(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            v = rng.standard_normal(rng.integers(1, 30)) * 10.0
            once = project_tangent(v).values
            twice = project_tangent(once).values
            np.testing.assert_allclose(twice, once, atol=1e-13)

    def test_orthogonal_projection(self):
        # residual v - Pv is orthogonal to every projected vector
        rng = np.random.default_rng(12)
        for _ in range(50):
            n = int(rng.integers(2, 20))
            v = rng.standard_normal(n)
            w = rng.standard_normal(n)
            res = v - project_tangent(v).values
            assert abs(res @ project_tangent(w).values) < 1e-12

    def test_large_magnitude_stays_feasible(self):
        rng = np.random.default_rng(13)
        v = rng.standard_normal(512) * 1e3
        assert abs(project_tangent(v).values.sum()) <= 1e-12

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            project_tangent([])


class TestSoftmax:
    def test_uniform_on_zero(self):
        for n in (1, 2, 5):
            p = softmax(np.zeros(n))
            np.testing.assert_allclose(p.values, 1.0 / n, atol=1e-15)

    def test_shift_invariance(self):
        rng = np.random.default_rng(21)
        z = rng.standard_normal(6)
        np.testing.assert_array_equal(softmax(z).values, softmax(z + 7.0).values)

    def test_two_point_value(self):
        p = softmax([np.log(2.0), 0.0])
        np.testing.assert_allclose(p.values, [2.0 / 3.0, 1.0 / 3.0], atol=1e-15)
        # naive formula cross-check
        e = np.exp([np.log(2.0), 0.0])
        np.testing.assert_allclose(p.values, e / e.sum(), atol=1e-15)

    def test_extreme_inputs_stay_feasible(self):
        rng = np.random.default_rng(22)
        for _ in range(100):
            n = int(rng.integers(1, 40))
            z = rng.uniform(-1e3, 1e3, size=n)
            softmax(z)  # constructor enforces the feasibility invariants

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="non-finite"):
            softmax([np.inf, 0.0])
        with pytest.raises(ValueError, match="non-finite"):
            softmax([np.nan, 0.0])


class TestSoftmaxCovariance:
    def test_two_point_matrix(self):
        S = softmax_covariance(SimplexPoint([0.5, 0.5]))
        np.testing.assert_array_equal(S, [[0.25, -0.25], [-0.25, 0.25]])
        assert abs(np.linalg.norm(S, 2) - 0.5) < 1e-15

    def test_deterministic_point_gives_zero(self):
        S = softmax_covariance(SimplexPoint([1.0, 0.0]))
        np.testing.assert_array_equal(S, np.zeros((2, 2)))

    def test_quadratic_form_is_variance(self):
        rng = np.random.default_rng(31)
        for _ in range(200):
            n = int(rng.integers(2, 12))
            p = rng.dirichlet(np.ones(n))
            v = rng.standard_normal(n)
            S = softmax_covariance(SimplexPoint(p / p.sum()))
            direct = float(np.sum(p * v * v) - np.sum(p * v) ** 2)
            assert abs(v @ S @ v - direct) < 1e-12 * max(1.0, abs(direct))

    def test_annihilates_ones_and_psd(self):
        rng = np.random.default_rng(32)
        for _ in range(50):
            n = int(rng.integers(2, 12))
            p = rng.dirichlet(np.ones(n))
            S = softmax_covariance(SimplexPoint(p / p.sum()))
            np.testing.assert_allclose(S @ np.ones(n), 0.0, atol=1e-14)
            assert np.linalg.eigvalsh(S).min() > -1e-14

    def test_norm_bound_half(self):
        rng = np.random.default_rng(33)
        worst = 0.0
        for _ in range(2000):
            n = int(rng.integers(2, 16))
            p = rng.dirichlet(np.ones(n))
            v = rng.standard_normal(n)
            S = softmax_covariance(SimplexPoint(p / p.sum()))
            worst = max(worst, float(v @ S @ v) / float(v @ v))
        assert worst <= 0.5 + 1e-12

    def test_norm_bound_attained(self):
        p = SimplexPoint([0.5, 0.5, 0.0, 0.0])
        v = np.array([1.0, -1.0, 0.0, 0.0])
        S = softmax_covariance(p)
        assert float(v @ S @ v) / float(v @ v) == 0.5

    def test_matches_softmax_jacobian(self):
        # covariance at softmax(z) equals the derivative of softmax at z
        rng = np.random.default_rng(34)
        h = 1e-6
        for _ in range(10):
            n = int(rng.integers(2, 8))
            z = rng.standard_normal(n)
            S = softmax_covariance(softmax(z))
            J = np.zeros((n, n))
            for j in range(n):
                e = np.zeros(n)
                e[j] = h
                J[:, j] = (softmax(z + e).values - softmax(z - e).values) / (2 * h)
            assert np.max(np.abs(J - S)) <= 1e-6 * max(1e-3, np.max(np.abs(S)))


class TestNormalize:
    def test_clamps_and_rescales(self):
        p = normalize([2.0, -1.0, 2.0])
        np.testing.assert_allclose(p.values, [0.5, 0.0, 0.5], atol=1e-15)

    def test_rejects_no_mass(self):
        with pytest.raises(ValueError, match="positive mass"):
            normalize([-1.0, 0.0])

    def test_never_applied_by_simplex_point(self):
        # feasibility violations are rejected, not repaired
        with pytest.raises(ValueError):
            SimplexPoint([0.7, 0.7])
