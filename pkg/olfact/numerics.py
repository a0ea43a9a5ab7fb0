import logging

import numpy as np
from scipy import linalg
from sklearn.decomposition import PCA

from defaults import RANK_THRESHOLD, SVD_MAX_SWEEPS
from errors import DegenerateDataError, DimensionMismatchError, InvalidConfigError, NoConvergenceError, NonFiniteError

LOGGER = logging.getLogger('olfact')

# Entries of a singular vector at or below this magnitude are skipped when fixing its sign.
SIGN_EPSILON = 1e-12


class SvdResult:

    def __init__(self, u: np.ndarray, s: np.ndarray, vt: np.ndarray):
        self.u = u
        self.s = s
        self.vt = vt

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.s) @ self.vt


class PcaResult:

    def __init__(self, components: np.ndarray, coords: np.ndarray, explained_variance: np.ndarray, explained_variance_ratio: np.ndarray, mean: np.ndarray):
        self.components = components
        self.coords = coords
        self.explained_variance = explained_variance
        self.explained_variance_ratio = explained_variance_ratio
        self.mean = mean

    def project(self, points: np.ndarray) -> np.ndarray:
        return (np.atleast_2d(points) - self.mean) @ self.components.T


def as_matrix(values, name: str = 'matrix') -> np.ndarray:
    '''
    Converts the input to a 2-D float array and refuses NaN/Inf entries.
    '''
    matrix = np.array(values, dtype=float)
    if matrix.ndim != 2:
        raise DimensionMismatchError(f'{name} must be two-dimensional, got shape {matrix.shape}.')
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteError(f'{name} contains NaN or Inf entries.')
    return matrix


def as_vector(values, name: str = 'vector') -> np.ndarray:
    vector = np.array(values, dtype=float)
    if vector.ndim != 1:
        raise DimensionMismatchError(f'{name} must be one-dimensional, got shape {vector.shape}.')
    if not np.all(np.isfinite(vector)):
        raise NonFiniteError(f'{name} contains NaN or Inf entries.')
    return vector


def svd(m) -> SvdResult:
    '''
    Thin SVD with a fixed sign convention: the first nonzero entry of every left singular vector is nonnegative.
    '''
    matrix = as_matrix(m)
    try:
        u, s, vt = np.linalg.svd(matrix, full_matrices=False)
    except np.linalg.LinAlgError:
        LOGGER.warning(f'gesdd failed on a {matrix.shape} matrix, retrying with gesvd.')
        try:
            u, s, vt = linalg.svd(matrix, full_matrices=False, lapack_driver='gesvd')
        except np.linalg.LinAlgError:
            raise NoConvergenceError('SVD did not converge', float('nan'), SVD_MAX_SWEEPS)

    for i in range(u.shape[1]):
        nonzero = np.flatnonzero(np.abs(u[:, i]) > SIGN_EPSILON)
        if len(nonzero) > 0 and u[nonzero[0], i] < 0:
            u[:, i] = -u[:, i]
            vt[i, :] = -vt[i, :]

    return SvdResult(u, s, vt)


def svt(m, tau: float) -> np.ndarray:
    '''
    Singular value thresholding, the proximal operator of tau times the nuclear norm.
    '''
    if tau < 0:
        raise InvalidConfigError(f'Threshold must be nonnegative, got {tau}.')
    matrix = as_matrix(m)
    if tau == 0:
        return matrix.copy()

    decomposition = svd(matrix)
    shrunk = np.maximum(decomposition.s - tau, 0.0)
    return (decomposition.u * shrunk) @ decomposition.vt


def nuclear_norm(m) -> float:
    return float(np.sum(svd(m).s))


def spectral_norm(m) -> float:
    matrix = as_matrix(m)
    if matrix.size == 0:
        return 0.0
    return float(svd(matrix).s[0])


def group_norm(w) -> float:
    '''
    l1/l2 norm: the sum over rows of the row-wise Euclidean norms.
    '''
    weights = np.atleast_2d(np.asarray(w, dtype=float))
    if np.asarray(w).ndim == 1:
        weights = weights.T
    return float(np.sum(np.linalg.norm(weights, axis=1)))


def rank(singular_values, threshold: float = RANK_THRESHOLD) -> int:
    '''
    Counts singular values above threshold times the largest one.
    '''
    values = np.asarray(singular_values, dtype=float)
    if len(values) == 0 or values[0] <= 0:
        return 0
    return int(np.sum(values > threshold * values[0]))


def project_nonneg(v) -> np.ndarray:
    return np.maximum(np.asarray(v, dtype=float), 0.0)


def prox_nonneg_group(v, theta: float) -> np.ndarray:
    '''
    Minimizer of 1/2 ||x - v||^2 + theta ||x||_2 over x >= 0.
    '''
    if theta < 0:
        raise InvalidConfigError(f'Threshold must be nonnegative, got {theta}.')
    positive = project_nonneg(v)
    norm = np.linalg.norm(positive)
    if norm <= theta:
        return np.zeros_like(positive)
    return (1.0 - theta / norm) * positive


def prox_nonneg_group_rows(v, theta: float) -> np.ndarray:
    '''
    prox_nonneg_group applied to every row of a matrix.
    '''
    if theta < 0:
        raise InvalidConfigError(f'Threshold must be nonnegative, got {theta}.')
    positive = project_nonneg(v)
    norms = np.linalg.norm(positive, axis=1)
    active = norms > theta
    scale = np.zeros_like(norms)
    scale[active] = 1.0 - theta / norms[active]
    return positive * scale[:, np.newaxis]


def prox_nonneg_l1(v, theta: float) -> np.ndarray:
    '''
    Minimizer of 1/2 ||x - v||^2 + theta sum(x) over x >= 0.
    '''
    if theta < 0:
        raise InvalidConfigError(f'Threshold must be nonnegative, got {theta}.')
    return np.maximum(np.asarray(v, dtype=float) - theta, 0.0)


def prox_nonneg_l2sq(v, theta: float) -> np.ndarray:
    '''
    Minimizer of 1/2 ||x - v||^2 + theta ||x||^2 over x >= 0.
    '''
    if theta < 0:
        raise InvalidConfigError(f'Threshold must be nonnegative, got {theta}.')
    return project_nonneg(v) / (1.0 + 2.0 * theta)


def pca(points, n_components: int) -> PcaResult:
    '''
    Principal components of the rows of points. Components follow the same sign convention as svd.
    '''
    data = as_matrix(points, 'points')
    n_points, dims = data.shape
    if n_points < 2:
        raise InvalidConfigError(f'PCA needs at least 2 points, got {n_points}.')
    if not 1 <= n_components <= min(dims, n_points - 1):
        raise InvalidConfigError(f'n_components must lie in [1, {min(dims, n_points - 1)}], got {n_components}.')

    centered = data - data.mean(axis=0)
    if np.max(np.abs(centered)) <= SIGN_EPSILON * max(1.0, np.max(np.abs(data))):
        raise DegenerateDataError('All points are identical; there is no variance to project.')

    model = PCA(n_components=n_components, svd_solver='full')
    coords = model.fit_transform(data)
    components = model.components_.copy()

    for i in range(components.shape[0]):
        nonzero = np.flatnonzero(np.abs(components[i]) > SIGN_EPSILON)
        if len(nonzero) > 0 and components[i, nonzero[0]] < 0:
            components[i] = -components[i]
            coords[:, i] = -coords[:, i]

    return PcaResult(components, coords, model.explained_variance_.copy(), model.explained_variance_ratio_.copy(), model.mean_.copy())
