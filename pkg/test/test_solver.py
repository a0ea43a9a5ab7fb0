import unittest

import numpy as np

import olfact.numerics as numerics
from errors import NoConvergenceError
from olfact.solver import accelerated_proximal_gradient


def least_squares_problem(m, b, theta=0.0):
    '''
    1/2 ||M x - b||^2 + theta sum(x) over x >= 0.
    '''
    def smooth(x):
        return 0.5 * float(np.sum((m @ x - b) ** 2))

    def gradient(x):
        return m.T @ (m @ x - b)

    def prox(v, step):
        return numerics.prox_nonneg_l1(v, theta * step)

    def penalty(x):
        return theta * float(np.sum(x))

    return smooth, gradient, prox, penalty


class SolverTest(unittest.TestCase):

    def test_projection_solved_in_one_step(self):
        # setup
        c = np.array([1.0, -2.0, 0.5])
        smooth, gradient, prox, penalty = least_squares_problem(np.eye(3), c)

        # run
        result = accelerated_proximal_gradient(smooth, gradient, prox, penalty, np.zeros(3), 1.0, 1e-12, 100)

        # assert
        self.assertTrue(np.array_equal(result.x, [1.0, 0.0, 0.5]))
        self.assertEqual(result.iterations, 1)
        self.assertEqual(result.kkt_residual, 0.0)

    def test_nonnegative_lasso_matches_closed_form(self):
        m = np.diag([2.0, 1.0, 0.5])
        b = np.array([4.0, 1.0, -1.0])
        theta = 0.5
        smooth, gradient, prox, penalty = least_squares_problem(m, b, theta)

        result = accelerated_proximal_gradient(smooth, gradient, prox, penalty, np.zeros(3), 4.0, 1e-12, 10000)

        # separable: x_i = max(m_i b_i - theta, 0) / m_i^2
        expected = np.maximum(np.diag(m) * b - theta, 0) / np.diag(m) ** 2
        self.assertTrue(np.allclose(result.x, expected, atol=1e-10))
        self.assertEqual(result.x[2], 0.0)

    def test_objective_never_increases(self):
        rng = np.random.default_rng(0)
        m = rng.standard_normal((20, 8)) @ np.diag(np.logspace(0, -2, 8))
        b = rng.standard_normal(20)
        smooth, gradient, prox, penalty = least_squares_problem(m, b, 0.01)

        result = accelerated_proximal_gradient(smooth, gradient, prox, penalty, np.zeros(8), numerics.spectral_norm(m) ** 2, 1e-7, 50000)

        self.assertTrue(np.all(np.diff(result.objective_trace) <= 0))
        self.assertTrue(result.kkt_residual <= 1e-7 or result.stalled)

    def test_unreachable_tolerance_stops_at_frozen_iterate(self):
        # setup
        rng = np.random.default_rng(1)
        m = rng.standard_normal((20, 8)) @ np.diag(np.logspace(0, -2, 8))
        b = rng.standard_normal(20)
        smooth, gradient, prox, penalty = least_squares_problem(m, b, 0.01)

        # run
        result = accelerated_proximal_gradient(smooth, gradient, prox, penalty, np.zeros(8), numerics.spectral_norm(m) ** 2, 0.0, 200000)

        # assert
        self.assertLess(result.iterations, 200000)
        self.assertLessEqual(result.kkt_residual, 1e-6)
        self.assertTrue(result.stalled or result.kkt_residual == 0.0)
        self.assertTrue(np.all(np.diff(result.objective_trace) <= 0))

    def test_coarse_objective_stalls_instead_of_failing(self):
        m = np.diag([2.0, 1.0, 0.5])
        b = np.array([4.0, 1.0, -1.0])
        smooth, gradient, prox, penalty = least_squares_problem(m, b, 0.5)

        def coarse_smooth(x):
            # objective values resolved to 1e-3 only, so progress ends long before the KKT target
            return round(smooth(x), 3)

        result = accelerated_proximal_gradient(coarse_smooth, gradient, prox, penalty, np.zeros(3), 4.0, 1e-14, 100000)

        self.assertTrue(result.stalled)
        self.assertGreater(result.kkt_residual, 1e-14)
        expected = np.maximum(np.diag(m) * b - 0.5, 0) / np.diag(m) ** 2
        self.assertTrue(np.allclose(result.x, expected, atol=0.15))
        self.assertTrue(np.all(np.diff(result.objective_trace) < 0))

    def test_no_convergence(self):
        m = np.diag([1.0, 0.01])
        smooth, gradient, prox, penalty = least_squares_problem(m, np.array([1.0, 1.0]))

        with self.assertRaises(NoConvergenceError) as raised:
            accelerated_proximal_gradient(smooth, gradient, prox, penalty, np.zeros(2), 1.0, 1e-12, 2)

        self.assertEqual(raised.exception.iterations, 2)
        self.assertGreater(raised.exception.kkt_residual, 1e-12)

    def test_constant_smooth_part(self):
        smooth, gradient, prox, penalty = least_squares_problem(np.zeros((2, 2)), np.zeros(2), 1.0)

        result = accelerated_proximal_gradient(smooth, gradient, prox, penalty, np.ones(2), 0.0, 1e-9, 10)

        self.assertTrue(np.array_equal(result.x, [0.0, 0.0]))
        self.assertEqual(result.iterations, 0)
