import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import plain_rk4_affine
from pricegrav import SingularMatrix, affine_steady_solution, gauss_solve, mat_exp


class TestGaussSolve:
    def test_identity(self):
        np.testing.assert_array_equal(gauss_solve(np.eye(2), [3, 4]), [3, 4])

    def test_permutation_needs_pivot(self):
        # M[0, 0] = 0, so elimination without row exchange would divide by zero
        np.testing.assert_array_equal(gauss_solve([[0, 1], [1, 0]], [1, 2]), [2, 1])

    def test_two_by_two(self):
        # 2*1 + 1*3 = 5 and 1*1 + 3*3 = 10
        x = gauss_solve([[2, 1], [1, 3]], [5, 10])
        np.testing.assert_allclose(x, [1, 3], rtol=0, atol=1e-14)

    def test_inputs_not_mutated(self):
        M = np.array([[0.0, 1.0], [1.0, 0.0]])
        b = np.array([1.0, 2.0])
        gauss_solve(M, b)
        np.testing.assert_array_equal(M, [[0, 1], [1, 0]])
        np.testing.assert_array_equal(b, [1, 2])

    @pytest.mark.parametrize("M", [
        [[1, 2], [2, 4]],
        [[0, 0], [0, 0]],
        [[1, 1, 1], [1, 1, 1], [0, 0, 1]],
    ])
    def test_singular(self, M):
        with pytest.raises(SingularMatrix):
            gauss_solve(M, np.ones(len(M)))

    def test_pivot_tol_is_relative(self):
        # same matrix at two price scales: both must solve
        M = np.array([[2.0, 1.0], [1.0, 3.0]])
        for scale in (1e-9, 1e9):
            x = gauss_solve(scale * M, scale * np.array([5.0, 10.0]))
            np.testing.assert_allclose(x, [1, 3], rtol=1e-12)

    def test_shape_errors(self):
        with pytest.raises(ValueError):
            gauss_solve(np.ones((2, 3)), [1, 2])
        with pytest.raises(ValueError):
            gauss_solve(np.eye(2), [1, 2, 3])
        with pytest.raises(ValueError):
            gauss_solve([[np.nan, 0], [0, 1]], [1, 1])

    @settings(max_examples=60, deadline=None)
    @given(n=st.integers(1, 50), seed=st.integers(0, 2**32 - 1))
    def test_residual_random_well_conditioned(self, n, seed):
        rng = np.random.default_rng(seed)
        M = rng.normal(size=(n, n))
        if np.linalg.cond(M) >= 1e6:
            M += n * np.eye(n)
        b = rng.normal(size=n)
        x = gauss_solve(M, b)
        assert np.abs(M @ x - b).max() <= 1e-9 * np.abs(b).max()


class TestMatExp:
    def test_zero(self):
        np.testing.assert_array_equal(mat_exp(np.zeros((3, 3)), 5.0), np.eye(3))

    def test_diagonal(self):
        E = mat_exp(np.diag([1.0, -1.0]), 1.0)
        np.testing.assert_allclose(np.diag(E), [math.e, 1 / math.e], rtol=1e-12)
        assert E[0, 1] == 0 and E[1, 0] == 0

    @pytest.mark.parametrize("d", [[-30.0, 0.5, 4.0], [10.0, -10.0, 1e-3]])
    def test_diagonal_wide_range(self, d):
        E = mat_exp(np.diag(d), 1.0)
        np.testing.assert_allclose(np.diag(E), np.exp(d), rtol=1e-12)

    def test_nilpotent(self):
        np.testing.assert_allclose(mat_exp([[0, 1], [0, 0]], 2.0), [[1, 2], [0, 1]],
                                   rtol=0, atol=1e-15)

    def test_rotation(self):
        E = mat_exp([[0, -1], [1, 0]], math.pi / 3)
        c, s = math.cos(math.pi / 3), math.sin(math.pi / 3)
        np.testing.assert_allclose(E, [[c, -s], [s, c]], atol=1e-14)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            mat_exp([[np.inf]], 1.0)
        with pytest.raises(ValueError):
            mat_exp([[1.0]], np.nan)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), s=st.floats(-1, 1), t=st.floats(-1, 1),
           n=st.integers(1, 5))
    def test_semigroup(self, seed, s, t, n):
        rng = np.random.default_rng(seed)
        M = rng.normal(size=(n, n))
        M /= max(1.0, np.abs(M).sum(axis=1).max())
        lhs = mat_exp(M, s + t)
        rhs = mat_exp(M, s) @ mat_exp(M, t)
        assert np.abs(lhs - rhs).max() <= 1e-10

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), t=st.floats(-2, 2))
    def test_commutes_with_generator(self, seed, t):
        rng = np.random.default_rng(seed)
        M = rng.normal(size=(4, 4))
        E = mat_exp(M, t)
        assert np.abs(E @ M - M @ E).max() <= 1e-10 * max(1.0, np.abs(E).max())


class TestAffineSolution:
    def test_scalar_decay(self):
        x = affine_steady_solution([[-1.0]], [0.0], [1.0], 1.0)
        np.testing.assert_allclose(x, [math.exp(-1)], rtol=1e-14)
        assert abs(x[0] - 0.36787944) < 1e-8

    def test_approaches_fixed_point(self):
        x = affine_steady_solution([[-1.0]], [1.0], [0.0], 40.0)
        np.testing.assert_allclose(x, [1.0], atol=1e-15)

    def test_time_zero_is_exact(self, rng):
        M = rng.normal(size=(3, 3)) - 3 * np.eye(3)
        P0 = rng.normal(size=3)
        np.testing.assert_array_equal(affine_steady_solution(M, rng.normal(size=3), P0, 0.0), P0)

    def test_matches_fine_rk4(self, rng):
        for _ in range(5):
            M = rng.normal(size=(3, 3)) - 3 * np.eye(3)
            g, P0 = rng.normal(size=3), rng.normal(size=3)
            ref = plain_rk4_affine(M, g, P0, 0.7, 10_000)
            np.testing.assert_allclose(affine_steady_solution(M, g, P0, 0.7), ref,
                                       rtol=0, atol=1e-8)

    def test_singular_generator(self):
        with pytest.raises(SingularMatrix):
            affine_steady_solution([[1.0, 1.0], [1.0, 1.0]], [0, 0], [1, 1], 1.0)
