import unittest
from unittest.mock import patch

import numpy as np
from scipy.optimize import minimize

import olfact.numerics as numerics
from errors import DegenerateDataError, DimensionMismatchError, InvalidConfigError, NoConvergenceError, NonFiniteError


def first_nonzero_signs(u):
    signs = []
    for column in u.T:
        nonzero = np.flatnonzero(np.abs(column) > numerics.SIGN_EPSILON)
        signs.append(column[nonzero[0]] if len(nonzero) else 0.0)
    return np.array(signs)


class NumericsTest(unittest.TestCase):

    def test_svd_reconstructs_with_sign_convention(self):
        rng = np.random.default_rng(3)
        for shape in [(5, 3), (3, 5), (4, 4)]:
            m = rng.standard_normal(shape)

            result = numerics.svd(m)

            self.assertTrue(np.allclose(result.reconstruct(), m, atol=1e-12))
            self.assertTrue(np.all(first_nonzero_signs(result.u) >= 0))
            self.assertTrue(np.all(np.diff(result.s) <= 0))

    def test_svd_falls_back_to_gesvd(self):
        m = np.array([[3.0, 1.0], [1.0, 2.0]])
        with patch('olfact.numerics.np.linalg.svd', side_effect=np.linalg.LinAlgError):
            result = numerics.svd(m)
        self.assertTrue(np.allclose(result.reconstruct(), m))

    def test_svd_reports_no_convergence(self):
        with patch('olfact.numerics.np.linalg.svd', side_effect=np.linalg.LinAlgError), patch('olfact.numerics.linalg.svd', side_effect=np.linalg.LinAlgError):
            self.assertRaises(NoConvergenceError, numerics.svd, np.eye(2))

    def test_input_checks(self):
        self.assertRaises(NonFiniteError, numerics.svd, np.array([[1.0, np.nan]]))
        self.assertRaises(NonFiniteError, numerics.as_vector, [1.0, np.inf])
        self.assertRaises(DimensionMismatchError, numerics.as_matrix, [1.0, 2.0])
        self.assertRaises(DimensionMismatchError, numerics.as_vector, [[1.0]])

    def test_svt(self):
        m = np.diag([3.0, 1.0, 0.5])

        # zero threshold is the identity
        self.assertTrue(np.array_equal(numerics.svt(m, 0.0), m))

        # shrinks every singular value, drops the small ones
        self.assertTrue(np.allclose(numerics.svt(m, 0.75), np.diag([2.25, 0.25, 0.0])))

        # threshold above the spectral norm gives exact zeros
        self.assertTrue(np.all(numerics.svt(m, 3.0) == 0))

        self.assertRaises(InvalidConfigError, numerics.svt, m, -1.0)

    def test_norms_and_rank(self):
        m = np.diag([3.0, -2.0])
        self.assertAlmostEqual(numerics.nuclear_norm(m), 5.0)
        self.assertAlmostEqual(numerics.spectral_norm(m), 3.0)

        w = np.array([[3.0, 4.0], [0.0, 0.0], [1.0, 0.0]])
        self.assertAlmostEqual(numerics.group_norm(w), 6.0)
        # a vector is one column, so its group norm is the l1 norm
        self.assertAlmostEqual(numerics.group_norm(np.array([1.0, -2.0, 3.0])), 6.0)

        self.assertEqual(numerics.rank([5.0, 1.0, 1e-7]), 2)
        self.assertEqual(numerics.rank([5.0, 1.0, 1e-5]), 3)
        self.assertEqual(numerics.rank([0.0, 0.0]), 0)
        self.assertEqual(numerics.rank([]), 0)

    def test_prox_nonneg_group_matches_numeric_minimizer(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            v = rng.standard_normal(3) * 2
            theta = rng.uniform(0, 2)

            def prox_objective(x):
                return 0.5 * np.sum((x - v) ** 2) + theta * np.linalg.norm(x)

            x = numerics.prox_nonneg_group(v, theta)
            reference = minimize(prox_objective, np.full(3, 0.5), method='L-BFGS-B', bounds=[(0, None)] * 3)

            self.assertTrue(np.all(x >= 0))
            self.assertLessEqual(prox_objective(x), reference.fun + 1e-9)

    def test_prox_nonneg_group_zero_condition(self):
        rng = np.random.default_rng(12)
        for _ in range(1000):
            v = rng.standard_normal(4)
            positive_norm = np.linalg.norm(np.maximum(v, 0))
            theta = rng.uniform(0, 2)

            x = numerics.prox_nonneg_group(v, theta)

            if positive_norm <= theta:
                self.assertTrue(np.all(x == 0))
            else:
                # the prox keeps the direction of v+ and shrinks its norm by theta
                self.assertAlmostEqual(np.linalg.norm(x), positive_norm - theta, delta=1e-12)

    def test_prox_nonneg_group_rows(self):
        v = np.array([[3.0, 4.0], [0.3, -1.0], [-1.0, -1.0]])

        x = numerics.prox_nonneg_group_rows(v, 1.0)

        self.assertTrue(np.allclose(x[0], [2.4, 3.2]))
        self.assertTrue(np.all(x[1:] == 0))

    def test_prox_nonneg_l1_and_l2sq(self):
        rng = np.random.default_rng(13)
        grid = np.linspace(0, 10, 100001)
        for _ in range(1000):
            v = rng.standard_normal(5) * 2
            theta = rng.uniform(0, 2)

            l1 = numerics.prox_nonneg_l1(v, theta)
            l2sq = numerics.prox_nonneg_l2sq(v, theta)

            # coordinate-wise minimizers of the separable prox objectives on x >= 0
            for i in range(0, 5, 2):
                brute_l1 = grid[np.argmin(0.5 * (grid - v[i]) ** 2 + theta * grid)]
                brute_l2sq = grid[np.argmin(0.5 * (grid - v[i]) ** 2 + theta * grid ** 2)]
                self.assertAlmostEqual(l1[i], brute_l1, delta=1e-4)
                self.assertAlmostEqual(l2sq[i], brute_l2sq, delta=1e-4)
            self.assertTrue(np.all(l1 >= 0))
            self.assertTrue(np.all(l2sq >= 0))

    def test_pca(self):
        rng = np.random.default_rng(5)
        points = rng.standard_normal((30, 4)) * np.array([5.0, 2.0, 1.0, 0.1])

        result = numerics.pca(points, 2)

        self.assertEqual(result.coords.shape, (30, 2))
        self.assertTrue(np.all(first_nonzero_signs(result.components.T) >= 0))
        self.assertTrue(np.allclose(result.project(points), result.coords, atol=1e-10))
        self.assertTrue(np.all(np.diff(result.explained_variance) <= 0))

    def test_pca_of_collinear_points(self):
        # setup
        direction = np.array([1.0, -2.0, 0.5])
        offsets = np.linspace(-3.0, 4.0, 12)
        points = np.array([1.0, 1.0, 1.0]) + offsets[:, np.newaxis] * direction

        # run
        result = numerics.pca(points, 2)

        # assert
        self.assertAlmostEqual(result.explained_variance_ratio[0], 1.0, delta=1e-10)
        self.assertAlmostEqual(float(np.sum(result.explained_variance_ratio)), 1.0, delta=1e-10)
        self.assertTrue(np.allclose(np.abs(result.components[0]), np.abs(direction) / np.linalg.norm(direction), atol=1e-10))

    def test_pca_rejects_bad_input(self):
        self.assertRaises(DegenerateDataError, numerics.pca, np.ones((5, 3)), 2)
        self.assertRaises(InvalidConfigError, numerics.pca, np.eye(3), 3)
        self.assertRaises(InvalidConfigError, numerics.pca, np.eye(3), 0)
        self.assertRaises(InvalidConfigError, numerics.pca, np.ones((1, 3)), 1)
