import unittest

import numpy as np
from scipy.optimize import minimize

import olfact.numerics as numerics
import olfact.perceptmap as perceptmap
from corpus.data_objects import Dictionary, MixtureSpec
from corpus.synthetic import generate_synthetic
from errors import DimensionMismatchError, InvalidConfigError


def factorized_oracle(x, y, lam, seed):
    '''
    Upper bound on the optimal objective: min over U, V of 1/2 ||Y - U V^T X||^2 + lam/2 (||U||^2 + ||V||^2), whose
    minimum equals the nuclear norm regularized minimum.
    '''
    l, k = y.shape[0], x.shape[0]
    r = min(k, l)

    def unpack(z):
        return z[:l * r].reshape(l, r), z[l * r:].reshape(k, r)

    def value_and_gradient(z):
        u, v = unpack(z)
        residual = u @ v.T @ x - y
        value = 0.5 * np.sum(residual ** 2) + 0.5 * lam * (np.sum(u ** 2) + np.sum(v ** 2))
        grad_a = residual @ x.T
        return value, np.concatenate([(grad_a @ v + lam * u).ravel(), (grad_a.T @ u + lam * v).ravel()])

    start = np.random.default_rng(seed).standard_normal((l + k) * r) * 0.1
    result = minimize(value_and_gradient, start, jac=True, method='L-BFGS-B', options={'maxiter': 20000, 'ftol': 1e-15, 'gtol': 1e-12})
    u, v = unpack(result.x)
    return perceptmap.objective(x, y, u @ v.T, lam)


def identity_map(l, k):
    a = np.eye(l, k)
    return perceptmap.PerceptualMap(a, 0.0, numerics.svd(a).s, 0.0)


class PerceptMapTest(unittest.TestCase):

    def test_fit_without_regularization_recovers_percepts(self):
        # setup
        rng = np.random.default_rng(1)
        y = rng.uniform(0, 100, (3, 4))

        # run
        fitted = perceptmap.fit(np.eye(4), y, 0.0)

        # assert
        self.assertTrue(np.allclose(fitted.a, y, atol=1e-9))
        self.assertEqual(fitted.k, 4)
        self.assertEqual(fitted.l, 3)

    def test_large_lambda_gives_zero_map(self):
        for seed in range(10):
            rng = np.random.default_rng(seed)
            x = rng.standard_normal((4, 7))
            y = rng.uniform(0, 100, (3, 7))
            threshold = numerics.spectral_norm(y @ x.T)

            fitted = perceptmap.fit(x, y, threshold * (1 + 1e-9))

            self.assertTrue(np.all(fitted.a == 0))
            self.assertEqual(perceptmap.rank_of(fitted), 0)

    def test_fit_reaches_optimal_objective(self):
        for seed, (k, l, n) in zip(range(3), [(5, 4, 8), (3, 4, 6), (4, 2, 8)]):
            rng = np.random.default_rng(100 + seed)
            x = rng.standard_normal((k, n))
            y = rng.standard_normal((l, k)) @ x + 0.3 * rng.standard_normal((l, n))
            lam = 0.5 * numerics.spectral_norm(y @ x.T) / 4

            fitted = perceptmap.fit(x, y, lam, tol=1e-10)
            value = perceptmap.objective(x, y, fitted.a, lam)
            oracle = factorized_oracle(x, y, lam, seed)

            self.assertLessEqual(value, oracle + 1e-6 * abs(oracle))

    def test_fit_is_locally_optimal(self):
        rng = np.random.default_rng(21)
        x = rng.standard_normal((5, 8))
        y = rng.standard_normal((4, 5)) @ x + 0.2 * rng.standard_normal((4, 8))
        lam = 2.0

        fitted = perceptmap.fit(x, y, lam, tol=1e-10)
        value = perceptmap.objective(x, y, fitted.a, lam)

        for _ in range(20):
            direction = rng.standard_normal(fitted.a.shape)
            direction /= np.linalg.norm(direction)
            self.assertGreaterEqual(perceptmap.objective(x, y, fitted.a + 1e-4 * direction, lam), value - 1e-8)

    def test_standardized_fit_stays_linear_in_raw_features(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal((3, 12)) * np.array([[100.0], [1.0], [0.01]])
        y = rng.standard_normal((2, 3)) @ (x / np.array([[100.0], [1.0], [0.01]]))

        fitted = perceptmap.fit(x, y, 0.0, tol=1e-12, standardize=True)

        self.assertTrue(fitted.standardize)
        self.assertTrue(np.allclose(fitted.a @ x, y, atol=1e-6))
        self.assertTrue(np.allclose(fitted.feature_scale, np.sqrt(np.mean(x ** 2, axis=1))))

    def test_regularization_path_is_monotone(self):
        # setup
        rng = np.random.default_rng(31)
        x = rng.standard_normal((5, 20))
        y = rng.standard_normal((4, 5)) @ x + 0.5 * rng.standard_normal((4, 20))
        threshold = numerics.spectral_norm(y @ x.T)

        # run
        path = [perceptmap.fit(x, y, lam, tol=1e-10) for lam in threshold * np.array([0.0, 0.02, 0.05, 0.1, 0.2, 0.4, 0.8, 1.2])]

        # assert
        norms = [numerics.nuclear_norm(fitted.a) for fitted in path]
        residuals = [np.linalg.norm(y - fitted.a @ x) for fitted in path]
        for smaller_lam, larger_lam in zip(norms, norms[1:]):
            self.assertLessEqual(larger_lam, smaller_lam + 1e-7 * max(1.0, smaller_lam))
        for smaller_lam, larger_lam in zip(residuals, residuals[1:]):
            self.assertGreaterEqual(larger_lam, smaller_lam - 1e-7 * max(1.0, smaller_lam))
        self.assertEqual(norms[-1], 0.0)
        self.assertGreater(norms[0], norms[-2])

    def test_fit_rejects_bad_input(self):
        self.assertRaises(DimensionMismatchError, perceptmap.fit, np.ones((2, 3)), np.ones((2, 4)), 1.0)
        self.assertRaises(InvalidConfigError, perceptmap.fit, np.ones((2, 3)), np.ones((2, 3)), -1.0)

    def test_rank_recovery(self):
        # setup
        sigma, k, l, n = 0.5, 18, 20, 200
        compounds, percepts, _, _ = generate_synthetic(8, k, l, 2 * n, 5, 3, sigma)
        x = np.column_stack([record.features for record in compounds])
        y = np.column_stack([record.scores for record in percepts])
        x_train, y_train, x_test, y_test = x[:, :n], y[:, :n], x[:, n:], y[:, n:]
        critical = sigma * np.sqrt(n) * (np.sqrt(l) + np.sqrt(k))

        # run
        held_out = {}
        for lam in critical * np.logspace(-0.3, 0.5, 9):
            fitted = perceptmap.fit(x_train, y_train, lam)
            if perceptmap.rank_of(fitted) == 3:
                held_out[lam] = perceptmap.rmse(y_test, fitted.a @ x_test)

        # assert
        self.assertTrue(held_out)
        self.assertLessEqual(min(held_out.values()), 1.1 * sigma)

    def test_fold_indices_partition(self):
        folds = perceptmap.fold_indices(23, 5, 7)

        self.assertEqual(len(folds), 5)
        self.assertEqual(sorted(np.concatenate(folds).tolist()), list(range(23)))
        self.assertTrue(all(len(fold) in (4, 5) for fold in folds))
        self.assertTrue(all(np.array_equal(a, b) for a, b in zip(folds, perceptmap.fold_indices(23, 5, 7))))

    def test_cross_validate_selects_the_minimum(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal((4, 30))
        y = rng.standard_normal((3, 4)) @ x + 0.5 * rng.standard_normal((3, 30))
        grid = [0.1, 1.0, 10.0, 100.0, 1000.0]

        report = perceptmap.cross_validate(x, y, grid, folds=3, seed=2)

        self.assertEqual(report.fold_rmse.shape, (3, 5))
        self.assertEqual(report.fold_rank.shape, (3, 5))
        self.assertTrue(np.allclose(report.mean_rmse, report.fold_rmse.mean(axis=0)))
        self.assertEqual(report.best_lambda, grid[int(np.argmin(report.mean_rmse))])
        self.assertEqual(report.seed, 2)

    def test_cross_validate_workers_match_serial(self):
        rng = np.random.default_rng(10)
        x = rng.standard_normal((3, 20))
        y = rng.standard_normal((2, 3)) @ x

        serial = perceptmap.cross_validate(x, y, [0.5, 5.0], folds=4, seed=1)
        threaded = perceptmap.cross_validate(x, y, [0.5, 5.0], folds=4, seed=1, workers=3)

        self.assertTrue(np.allclose(serial.fold_rmse, threaded.fold_rmse, rtol=0, atol=1e-12))
        self.assertEqual(serial.best_lambda, threaded.best_lambda)

    def test_cross_validate_identical_folds(self):
        x = np.tile(np.array([[1.0], [2.0]]), (1, 6))
        y = np.tile(np.array([[10.0], [20.0], [30.0]]), (1, 6))

        report = perceptmap.cross_validate(x, y, [0.1, 1.0], folds=3, seed=0)

        for row in report.fold_rmse[1:]:
            self.assertTrue(np.allclose(row, report.fold_rmse[0], atol=1e-9))

    def test_cross_validate_rejects_bad_config(self):
        x, y = np.ones((2, 4)), np.ones((1, 4))
        self.assertRaises(InvalidConfigError, perceptmap.cross_validate, x, y, [1.0], folds=1)
        self.assertRaises(InvalidConfigError, perceptmap.cross_validate, x, y, [1.0], folds=5)
        self.assertRaises(InvalidConfigError, perceptmap.cross_validate, x, y, [10.0, 1.0], folds=2)
        self.assertRaises(InvalidConfigError, perceptmap.cross_validate, x, y, [-1.0, 1.0], folds=2)
        self.assertRaises(InvalidConfigError, perceptmap.cross_validate, x, y, [1.0], folds=2, workers=0)

    def test_predict_mixture_mixes_features_first(self):
        # setup
        a = np.array([[1.0, 2.0], [0.0, -1.0], [3.0, 0.5]])
        perceptual_map = perceptmap.PerceptualMap(a, 0.0, numerics.svd(a).s, 0.0)
        dictionary = Dictionary(['c1', 'c2', 'c3'], np.array([[1.0, 0.0, 2.0], [0.0, 1.0, 1.0]]))
        spec = MixtureSpec([('c3', 0.5), ('c1', 2.0)])

        # run & assert
        expected = a @ (0.5 * np.array([2.0, 1.0]) + 2.0 * np.array([1.0, 0.0]))
        self.assertTrue(np.allclose(perceptmap.predict_mixture(perceptual_map, dictionary, spec), expected))
        normalized = perceptmap.predict_mixture(perceptual_map, dictionary, spec, normalize=True)
        self.assertTrue(np.allclose(normalized, expected / np.linalg.norm([0.5, 2.0])))
        self.assertTrue(np.allclose(perceptmap.predict_compound(perceptual_map, [1.0, 0.0]), a[:, 0]))

        self.assertAlmostEqual(perceptmap.perceptual_distance(perceptual_map, dictionary, spec, spec), 0.0)
        self.assertAlmostEqual(perceptmap.feature_distance(perceptual_map, [1.0, 0.0], [0.0, 0.0]), np.linalg.norm(a[:, 0]))

        self.assertRaises(DimensionMismatchError, perceptmap.predict_compound, perceptual_map, [1.0, 2.0, 3.0])
        wide = Dictionary(['c1'], np.ones((3, 1)))
        self.assertRaises(DimensionMismatchError, perceptmap.predict_mixture, perceptual_map, wide, MixtureSpec([('c1', 1.0)]))

    def test_mixture_percepts_add_up(self):
        # setup
        rng = np.random.default_rng(12)
        a = rng.standard_normal((4, 3))
        perceptual_map = perceptmap.PerceptualMap(a, 0.0, numerics.svd(a).s, 0.0)
        dictionary = Dictionary([f'c{j}' for j in range(6)], rng.standard_normal((3, 6)))
        first = MixtureSpec([('c0', 0.4), ('c3', 1.5)])
        second = MixtureSpec([('c1', 2.0), ('c5', 0.25)])
        both = first.combined(second)
        doubled = first.scaled(2.0)

        # run
        percept_first = perceptmap.predict_mixture(perceptual_map, dictionary, first)
        percept_second = perceptmap.predict_mixture(perceptual_map, dictionary, second)

        # assert
        self.assertTrue(np.allclose(perceptmap.predict_mixture(perceptual_map, dictionary, both), percept_first + percept_second, atol=1e-12))
        self.assertTrue(np.allclose(perceptmap.predict_mixture(perceptual_map, dictionary, doubled), 2 * percept_first, atol=1e-12))

    def test_perceptual_distance_is_a_metric_on_percepts(self):
        rng = np.random.default_rng(13)
        a = rng.standard_normal((4, 3))
        perceptual_map = perceptmap.PerceptualMap(a, 0.0, numerics.svd(a).s, 0.0)
        dictionary = Dictionary([f'c{j}' for j in range(5)], rng.standard_normal((3, 5)))
        mixtures = [MixtureSpec([('c0', 1.0), ('c2', 0.5)]), MixtureSpec([('c1', 0.3)]), MixtureSpec([('c4', 2.0), ('c3', 0.1)])]

        for first in mixtures:
            for second in mixtures:
                forward = perceptmap.perceptual_distance(perceptual_map, dictionary, first, second)
                self.assertEqual(forward, perceptmap.perceptual_distance(perceptual_map, dictionary, second, first))
                self.assertEqual(perceptmap.perceptual_distance(perceptual_map, dictionary, first, second, normalize=True),
                                 perceptmap.perceptual_distance(perceptual_map, dictionary, second, first, normalize=True))
                for third in mixtures:
                    via = perceptmap.perceptual_distance(perceptual_map, dictionary, first, third) + perceptmap.perceptual_distance(perceptual_map, dictionary, third, second)
                    self.assertLessEqual(forward, via + 1e-12)

    def test_top_descriptors(self):
        most, least = perceptmap.top_descriptors([5.0, 40.0, 12.0, 0.0], ['garlic', 'sickening', 'sharp', 'sweet'], count=2)

        self.assertEqual(most, [('sickening', 40.0), ('sharp', 12.0)])
        self.assertEqual(least, [('sweet', 0.0), ('garlic', 5.0)])
        self.assertRaises(DimensionMismatchError, perceptmap.top_descriptors, [1.0], ['a', 'b'])

    def test_default_names(self):
        perceptual_map = identity_map(2, 3)
        self.assertEqual(perceptual_map.descriptors, ['d1', 'd2'])
        self.assertEqual(perceptual_map.feature_names, ['f1', 'f2', 'f3'])
