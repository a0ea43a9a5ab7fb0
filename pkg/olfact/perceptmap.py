import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Sequence, Tuple

import numpy as np
from sklearn.model_selection import KFold

import olfact.numerics as numerics
from corpus.data_objects import Dictionary, MixtureSpec
from corpus.mixing import mix
from defaults import CV_FOLDS, FIT_TOL, MAX_ITER
from errors import DimensionMismatchError, InvalidConfigError
from olfact.solver import accelerated_proximal_gradient

LOGGER = logging.getLogger('olfact')


class PerceptualMap:
    '''
    Learned linear map from physicochemical features (k) to odor descriptor scores (l).
    '''

    def __init__(self, a: np.ndarray, lam: float, singular_values: np.ndarray, train_rmse: float, descriptors: Sequence[str] = None,
                 feature_names: Sequence[str] = None, standardize: bool = False, feature_scale: np.ndarray = None, iterations: int = 0, kkt_residual: float = 0.0):
        self.a = np.asarray(a, dtype=float)
        self.lam = float(lam)
        self.singular_values = np.asarray(singular_values, dtype=float)
        self.train_rmse = float(train_rmse)
        self.descriptors = list(descriptors) if descriptors is not None else [f'd{i + 1}' for i in range(self.l)]
        self.feature_names = list(feature_names) if feature_names is not None else [f'f{i + 1}' for i in range(self.k)]
        self.standardize = standardize
        self.feature_scale = np.asarray(feature_scale, dtype=float) if feature_scale is not None else np.ones(self.k)
        self.iterations = iterations
        self.kkt_residual = kkt_residual

    @property
    def k(self) -> int:
        return self.a.shape[1]

    @property
    def l(self) -> int:
        return self.a.shape[0]


class CvReport:

    def __init__(self, lambda_grid: np.ndarray, fold_rmse: np.ndarray, mean_rmse: np.ndarray, best_lambda: float, fold_rank: np.ndarray, folds: int, seed: int):
        self.lambda_grid = np.asarray(lambda_grid, dtype=float)
        self.fold_rmse = np.asarray(fold_rmse, dtype=float)
        self.mean_rmse = np.asarray(mean_rmse, dtype=float)
        self.best_lambda = float(best_lambda)
        self.fold_rank = np.asarray(fold_rank, dtype=int)
        self.folds = folds
        self.seed = seed


def objective(x: np.ndarray, y: np.ndarray, a: np.ndarray, lam: float) -> float:
    '''
    1/2 ||Y - AX||_F^2 + lambda ||A||_*
    '''
    fidelity = 0.5 * float(np.sum((y - a @ x) ** 2))
    return fidelity + (lam * numerics.nuclear_norm(a) if lam > 0 else 0.0)


def rmse(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    '''
    Root mean squared error per descriptor (row), averaged across descriptors.
    '''
    return float(np.mean(np.sqrt(np.mean((y_true - y_pred) ** 2, axis=1))))


def feature_scales(x: np.ndarray) -> np.ndarray:
    '''
    Root mean square of every feature over the training compounds; constant-zero features keep scale 1.
    '''
    scale = np.sqrt(np.mean(x ** 2, axis=1))
    scale[scale == 0] = 1.0
    return scale


def fit(x, y, lam: float, tol: float = FIT_TOL, max_iter: int = MAX_ITER, standardize: bool = False, a_start: np.ndarray = None,
        descriptors: Sequence[str] = None, feature_names: Sequence[str] = None) -> PerceptualMap:
    '''
    Nuclear norm regularized multivariate regression of percepts y (l x n) on features x (k x n).

    With standardize each feature is divided by its root mean square before fitting and the scaling is
    folded back into the returned map, which stays linear in raw features.
    '''
    x = numerics.as_matrix(x, 'features')
    y = numerics.as_matrix(y, 'percepts')
    if x.shape[1] != y.shape[1]:
        raise DimensionMismatchError(f'Features have {x.shape[1]} compounds but percepts have {y.shape[1]}.')
    if lam < 0:
        raise InvalidConfigError(f'lambda must be nonnegative, got {lam}.')

    scale = feature_scales(x) if standardize else np.ones(x.shape[0])
    xs = x / scale[:, np.newaxis]
    gram = xs @ xs.T
    cross = y @ xs.T
    lipschitz = numerics.spectral_norm(xs) ** 2

    def smooth(a):
        return 0.5 * float(np.sum((y - a @ xs) ** 2))

    def gradient(a):
        return a @ gram - cross

    def prox(v, step):
        return numerics.svt(v, lam * step)

    def penalty(a):
        return lam * numerics.nuclear_norm(a) if lam > 0 else 0.0

    start = np.zeros((y.shape[0], x.shape[0])) if a_start is None else np.asarray(a_start, dtype=float) * scale[np.newaxis, :]
    LOGGER.info(f'Fitting perceptual map: k={x.shape[0]}, l={y.shape[0]}, n={x.shape[1]}, lambda={lam:g}.')
    result = accelerated_proximal_gradient(smooth, gradient, prox, penalty, start, lipschitz, tol, max_iter, name=f'map fit (lambda={lam:g})')

    a = result.x / scale[np.newaxis, :]
    singular_values = numerics.svd(a).s if a.size else np.zeros(0)
    LOGGER.info(f'Map fit converged in {result.iterations} iterations, rank {numerics.rank(singular_values)}.')
    return PerceptualMap(a, lam, singular_values, rmse(y, a @ x), descriptors, feature_names, standardize, scale, result.iterations, result.kkt_residual)


def rank_of(perceptual_map: PerceptualMap) -> int:
    return numerics.rank(perceptual_map.singular_values)


def fold_indices(n: int, folds: int, seed: int) -> List[np.ndarray]:
    '''
    Held-out compound indices per fold, from a seeded shuffled k-fold split.
    '''
    splitter = KFold(n_splits=folds, shuffle=True, random_state=seed)
    return [held_out for _, held_out in splitter.split(np.arange(n))]


def cross_validate(x, y, lambda_grid: Sequence[float], folds: int = CV_FOLDS, seed: int = 0, tol: float = FIT_TOL, max_iter: int = MAX_ITER,
                   standardize: bool = False, workers: int = 1) -> CvReport:
    '''
    K-fold cross-validation of the held-out RMSE over a lambda grid.

    Folds run on a thread pool of the given size and are reduced in fold order. Within a fold the grid is
    solved from the largest lambda down, each fit warm-started from the previous one.
    '''
    x = numerics.as_matrix(x, 'features')
    y = numerics.as_matrix(y, 'percepts')
    grid = np.asarray(lambda_grid, dtype=float)
    n = x.shape[1]
    if y.shape[1] != n:
        raise DimensionMismatchError(f'Features have {n} compounds but percepts have {y.shape[1]}.')
    if folds < 2:
        raise InvalidConfigError(f'Cross-validation needs at least 2 folds, got {folds}.')
    if n < folds:
        raise InvalidConfigError(f'{n} compounds cannot fill {folds} folds.')
    if len(grid) == 0 or np.any(np.diff(grid) <= 0) or np.any(grid < 0):
        raise InvalidConfigError('The lambda grid must be nonempty, nonnegative and strictly increasing.')
    if workers < 1:
        raise InvalidConfigError(f'workers must be at least 1, got {workers}.')

    def run_fold(held_out):
        train = np.setdiff1d(np.arange(n), held_out)
        errors = np.zeros(len(grid))
        ranks = np.zeros(len(grid), dtype=int)
        a_start = None
        for g in reversed(range(len(grid))):
            fitted = fit(x[:, train], y[:, train], grid[g], tol, max_iter, standardize, a_start)
            a_start = fitted.a
            errors[g] = rmse(y[:, held_out], fitted.a @ x[:, held_out])
            ranks[g] = rank_of(fitted)
        return errors, ranks

    assignments = fold_indices(n, folds, seed)
    LOGGER.info(f'Cross-validating {len(grid)} lambda values over {folds} folds with {workers} worker(s).')
    if workers == 1:
        results = [run_fold(held_out) for held_out in assignments]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_fold, assignments))

    fold_rmse = np.array([errors for errors, _ in results])
    fold_rank = np.array([ranks for _, ranks in results])
    mean_rmse = fold_rmse.mean(axis=0)
    best_lambda = float(grid[int(np.argmin(mean_rmse))])
    LOGGER.info(f'Best lambda {best_lambda:g} with mean held-out RMSE {mean_rmse.min():.6g}.')
    return CvReport(grid, fold_rmse, mean_rmse, best_lambda, fold_rank, folds, seed)


def predict_compound(perceptual_map: PerceptualMap, features) -> np.ndarray:
    features = numerics.as_vector(features, 'features')
    if len(features) != perceptual_map.k:
        raise DimensionMismatchError(f'Map expects {perceptual_map.k} features, got {len(features)}.')
    return perceptual_map.a @ features


def _check_dictionary(perceptual_map: PerceptualMap, dictionary: Dictionary):
    if dictionary.k != perceptual_map.k:
        raise DimensionMismatchError(f'Dictionary has {dictionary.k} features but the map expects {perceptual_map.k}.')


def predict_mixture(perceptual_map: PerceptualMap, dictionary: Dictionary, spec: MixtureSpec, normalize: bool = False) -> np.ndarray:
    '''
    Percept of a mixture: the features are combined first, then mapped.
    '''
    _check_dictionary(perceptual_map, dictionary)
    return perceptual_map.a @ mix(dictionary, spec, normalize)


def feature_distance(perceptual_map: PerceptualMap, features_a, features_b) -> float:
    return float(np.linalg.norm(predict_compound(perceptual_map, features_a) - predict_compound(perceptual_map, features_b)))


def perceptual_distance(perceptual_map: PerceptualMap, dictionary: Dictionary, spec_a: MixtureSpec, spec_b: MixtureSpec, normalize: bool = False) -> float:
    '''
    Distortion between two mixtures: l2 distance of their predicted percepts.
    '''
    return float(np.linalg.norm(predict_mixture(perceptual_map, dictionary, spec_a, normalize) - predict_mixture(perceptual_map, dictionary, spec_b, normalize)))


def dictionary_percepts(perceptual_map: PerceptualMap, dictionary: Dictionary) -> np.ndarray:
    '''
    A* X_dict: the percept of every dictionary compound, one column each.
    '''
    _check_dictionary(perceptual_map, dictionary)
    return perceptual_map.a @ dictionary.features


def top_descriptors(percept, descriptors: Sequence[str], count: int = 3) -> Tuple[List[Tuple[str, float]], List[Tuple[str, float]]]:
    '''
    The most and the least applicable descriptors of a percept.
    '''
    percept = numerics.as_vector(percept, 'percept')
    if len(percept) != len(descriptors):
        raise DimensionMismatchError(f'{len(percept)} scores for {len(descriptors)} descriptors.')
    order = np.argsort(-percept, kind='stable')
    most = [(descriptors[i], float(percept[i])) for i in order[:count]]
    least = [(descriptors[i], float(percept[i])) for i in order[::-1][:count]]
    return most, least
