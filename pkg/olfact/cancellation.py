import logging
from typing import List, Sequence, Tuple, Union

import numpy as np

import olfact.numerics as numerics
from corpus.data_objects import Dictionary, MixtureSpec
from defaults import ACTIVITY_THRESHOLD, DESIGN_TOL, MAX_ITER
from errors import DimensionMismatchError, InvalidConfigError
from olfact.perceptmap import PerceptualMap, dictionary_percepts
from olfact.solver import accelerated_proximal_gradient

LOGGER = logging.getLogger('olfact')


class CancellationProblem:
    '''
    Malodor percepts (one column each) to be neutralized with one shared set of dictionary compounds.
    '''

    def __init__(self, y_mal, dictionary: Dictionary, perceptual_map: PerceptualMap, mu: float, white_family: bool = False, odor_names: Sequence[str] = None):
        y_mal = numerics.as_matrix(y_mal, 'malodor percepts')
        if y_mal.shape[0] != perceptual_map.l:
            raise DimensionMismatchError(f'Malodor percepts have {y_mal.shape[0]} descriptors but the map predicts {perceptual_map.l}.')
        if mu < 0:
            raise InvalidConfigError(f'mu must be nonnegative, got {mu}.')

        self.y_mal = y_mal
        self.dictionary = dictionary
        self.perceptual_map = perceptual_map
        self.mu = float(mu)
        self.white_family = white_family
        self.odor_names = list(odor_names) if odor_names is not None else [f'malodor {j + 1}' for j in range(y_mal.shape[1])]
        self.d = dictionary_percepts(perceptual_map, dictionary)

    @property
    def m(self) -> int:
        return self.y_mal.shape[1]

    def with_mu(self, mu: float) -> 'CancellationProblem':
        return CancellationProblem(self.y_mal, self.dictionary, self.perceptual_map, mu, self.white_family, self.odor_names)

    def fidelity_terms(self) -> Tuple[np.ndarray, np.ndarray]:
        '''
        (Y, D) entering the fidelity; both centered over descriptors when the white family is allowed.
        '''
        if not self.white_family:
            return self.y_mal, self.d
        return self.y_mal - self.y_mal.mean(axis=0), self.d - self.d.mean(axis=0)


class CancellationSolution:

    def __init__(self, w: np.ndarray, support: List[str], residual_frobenius: float, residual_per_odor: np.ndarray, white_offset, iterations: int,
                 kkt_residual: float, objective: float, mu: float, objective_trace: List[float] = None):
        self.w = w
        self.support = support
        self.residual_frobenius = residual_frobenius
        self.residual_per_odor = residual_per_odor
        self.white_offset = white_offset
        self.iterations = iterations
        self.kkt_residual = kkt_residual
        self.objective = objective
        self.mu = mu
        self.objective_trace = objective_trace or []


class WhitenessReport:

    def __init__(self, support_size: int, span_rank: int, intensity_ratio: float):
        self.support_size = support_size
        self.span_rank = span_rank
        self.intensity_ratio = intensity_ratio


def active_rows(w: np.ndarray) -> np.ndarray:
    '''
    Rows holding a weight above the activity threshold relative to the largest weight.
    '''
    largest = float(np.max(w)) if w.size else 0.0
    if largest <= 0:
        return np.zeros(w.shape[0], dtype=bool)
    return np.any(w > ACTIVITY_THRESHOLD * largest, axis=1)


def residual_report(p: CancellationProblem, w) -> Tuple[float, np.ndarray]:
    '''
    Frobenius norm and per-malodor l2 norms of Y_mal + D W, centered over descriptors for the white family.
    '''
    w = np.asarray(w, dtype=float)
    if w.shape != (p.dictionary.n, p.m):
        raise DimensionMismatchError(f'Weights have shape {w.shape}, expected {(p.dictionary.n, p.m)}.')
    y, d = p.fidelity_terms()
    residual = y + d @ w
    return float(np.linalg.norm(residual)), np.linalg.norm(residual, axis=0)


def zero_threshold(p: CancellationProblem) -> float:
    '''
    Smallest mu for which W = 0 is optimal: the largest row norm of the positive part of -D^T Y.
    '''
    y, d = p.fidelity_terms()
    push = numerics.project_nonneg(-(d.T @ y))
    return float(np.max(np.linalg.norm(push, axis=1)))


def solve_cancellation(p: CancellationProblem, tol: float = DESIGN_TOL, max_iter: int = MAX_ITER, w_start: np.ndarray = None) -> CancellationSolution:
    y, d = p.fidelity_terms()
    mu = p.mu

    def smooth(w):
        return 0.5 * float(np.sum((y + d @ w) ** 2))

    def gradient(w):
        return d.T @ (y + d @ w)

    def prox(v, step):
        return numerics.prox_nonneg_group_rows(v, mu * step)

    def penalty(w):
        return mu * numerics.group_norm(w)

    start = np.zeros((p.dictionary.n, p.m)) if w_start is None else numerics.project_nonneg(w_start)
    LOGGER.info(f'Designing cancellation: {p.m} malodor(s), {p.dictionary.n} compounds, mu={mu:g}, white family {"on" if p.white_family else "off"}.')
    result = accelerated_proximal_gradient(smooth, gradient, prox, penalty, start, numerics.spectral_norm(d) ** 2, tol, max_iter, name=f'cancellation (mu={mu:g})')

    w = result.x
    active = active_rows(w)
    support = sorted(p.dictionary.ids[i] for i in np.flatnonzero(active))
    frobenius, per_odor = residual_report(p, w)
    white_offset = (p.y_mal + p.d @ w).mean(axis=0) if p.white_family else None
    LOGGER.info(f'Cancellation with mu={mu:g}: {len(support)} active compounds, residual {frobenius:.6g}.')
    return CancellationSolution(w, support, frobenius, per_odor, white_offset, result.iterations, result.kkt_residual, result.objective, mu, result.objective_trace)


def sweep_mu(p: CancellationProblem, mus: Sequence[float], tol: float = DESIGN_TOL, max_iter: int = MAX_ITER) -> List[CancellationSolution]:
    '''
    Regularization path over mus, solved from the largest mu down with warm starts. Solutions come back in the order of mus.
    '''
    if any(mu < 0 for mu in mus):
        raise InvalidConfigError('Every mu on the path must be nonnegative.')
    solutions = {}
    w_start = None
    for position in sorted(range(len(mus)), key=lambda i: -mus[i]):
        solution = solve_cancellation(p.with_mu(mus[position]), tol, max_iter, w_start)
        solutions[position] = solution
        w_start = solution.w
    return [solutions[position] for position in range(len(mus))]


def whiteness_report(p: CancellationProblem, sol: CancellationSolution) -> WhitenessReport:
    '''
    How white the deployed blend is: how many compounds, how many perceptual directions they span,
    and how even their delivered intensities are (min over max).
    '''
    active = np.flatnonzero(active_rows(sol.w))
    if len(active) == 0:
        return WhitenessReport(0, 0, 0.0)
    columns = p.d[:, active]
    span = numerics.rank(numerics.svd(columns).s)
    intensities = np.linalg.norm(columns, axis=0) * np.linalg.norm(sol.w[active], axis=1)
    ratio = float(intensities.min() / intensities.max()) if intensities.max() > 0 else 0.0
    return WhitenessReport(len(active), span, ratio)


def additive_for(p: CancellationProblem, sol: CancellationSolution, odor: Union[int, str]) -> MixtureSpec:
    '''
    Concentrations the device releases when the given malodor is detected.
    '''
    if isinstance(odor, str):
        if odor not in p.odor_names:
            raise InvalidConfigError(f'Unknown malodor {odor}; expected one of {", ".join(p.odor_names)}.')
        column = p.odor_names.index(odor)
    else:
        column = odor
    if not 0 <= column < p.m:
        raise InvalidConfigError(f'No malodor at position {column}.')
    weights = sol.w[:, column]
    entries = [(p.dictionary.ids[i], float(weights[i])) for i in np.flatnonzero(active_rows(sol.w)) if weights[i] > 0]
    if not entries:
        raise InvalidConfigError(f'No compound is released for {p.odor_names[column]}.')
    return MixtureSpec(entries)


def pca_points(p: CancellationProblem, sol: CancellationSolution) -> List[Tuple[str, str, float, float]]:
    '''
    2-D principal coordinates of the dictionary percepts, with the malodors projected into the same plane.
    Rows are (kind, id, pc1, pc2) with kind one of dictionary, selected, malodor.
    '''
    projection = numerics.pca(p.d.T, 2)
    LOGGER.info(f'PCA plane explains {100 * float(np.sum(projection.explained_variance_ratio)):.1f}% of the dictionary percept variance.')
    selected = set(sol.support)
    points = []
    for j, compound_id in enumerate(p.dictionary.ids):
        kind = 'selected' if compound_id in selected else 'dictionary'
        points.append((kind, compound_id, float(projection.coords[j, 0]), float(projection.coords[j, 1])))
    malodors = projection.project(p.y_mal.T)
    for j, name in enumerate(p.odor_names):
        points.append(('malodor', name, float(malodors[j, 0]), float(malodors[j, 1])))
    return points
