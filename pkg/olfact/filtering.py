import logging
from typing import List, Sequence, Tuple

import numpy as np

import olfact.numerics as numerics
from corpus.data_objects import Dictionary
from defaults import DESIGN_TOL, MAX_ITER
from errors import DimensionMismatchError, FrozenCoordinateError, InvalidConfigError
from olfact.perceptmap import PerceptualMap, dictionary_percepts
from olfact.steganography import StegoSolution, check_regularizer, design_solution, solve_nonneg_design

LOGGER = logging.getLogger('olfact')


class FilterProblem:
    '''
    Steer the percept of an incoming smell x_in towards y_des by adding dictionary compounds.
    '''

    def __init__(self, x_in, y_des, dictionary: Dictionary, perceptual_map: PerceptualMap, mu: float, regularizer: str = 'l1'):
        check_regularizer(regularizer)
        if mu < 0:
            raise InvalidConfigError(f'mu must be nonnegative, got {mu}.')
        self.x_in = _check_input(x_in, perceptual_map)
        self.y_des = _check_target(y_des, perceptual_map)
        self.dictionary = dictionary
        self.perceptual_map = perceptual_map
        self.mu = float(mu)
        self.regularizer = regularizer
        self.e = dictionary_percepts(perceptual_map, dictionary)
        self.b = perceptual_map.a @ self.x_in - self.y_des


class ScenarioSegment:

    def __init__(self, steps: int, x_in: np.ndarray, y_des: np.ndarray):
        if steps < 1:
            raise InvalidConfigError(f'Every segment needs at least one step, got {steps}.')
        self.steps = int(steps)
        self.x_in = numerics.as_vector(x_in, 'x_in')
        self.y_des = numerics.as_vector(y_des, 'y_des')


class EnvironmentScenario:
    '''
    Piecewise-stationary environment: each segment holds an incoming smell and a target percept for some steps.
    The incoming smell may drift with seeded Gaussian jitter.
    '''

    def __init__(self, segments: Sequence[ScenarioSegment], seed: int = 0, jitter_sigma: float = 0.0):
        if not segments:
            raise InvalidConfigError('A scenario needs at least one segment.')
        if jitter_sigma < 0:
            raise InvalidConfigError(f'jitter_sigma must be nonnegative, got {jitter_sigma}.')
        if len({len(segment.x_in) for segment in segments}) != 1 or len({len(segment.y_des) for segment in segments}) != 1:
            raise DimensionMismatchError('All scenario segments must share the same x_in and y_des lengths.')
        self.segments = list(segments)
        self.seed = seed
        self.jitter_sigma = float(jitter_sigma)

    @property
    def total_steps(self) -> int:
        return sum(segment.steps for segment in self.segments)


class AdaptiveRun:

    def __init__(self, eta: float, mu: float, w_trajectory: np.ndarray, residual_trajectory: np.ndarray, scenario: EnvironmentScenario,
                 ids: List[str], clamp_events: int, frozen: List[str]):
        self.eta = eta
        self.mu = mu
        self.w_trajectory = w_trajectory
        self.residual_trajectory = residual_trajectory
        self.scenario = scenario
        self.ids = ids
        self.clamp_events = clamp_events
        self.frozen = frozen


def _check_input(x_in, perceptual_map: PerceptualMap) -> np.ndarray:
    x_in = numerics.as_vector(x_in, 'x_in')
    if len(x_in) != perceptual_map.k:
        raise DimensionMismatchError(f'x_in has {len(x_in)} features but the map expects {perceptual_map.k}.')
    return x_in


def _check_target(y_des, perceptual_map: PerceptualMap) -> np.ndarray:
    y_des = numerics.as_vector(y_des, 'y_des')
    if len(y_des) != perceptual_map.l:
        raise DimensionMismatchError(f'y_des has {len(y_des)} descriptors but the map predicts {perceptual_map.l}.')
    return y_des


def solve_filter(p: FilterProblem, tol: float = DESIGN_TOL, max_iter: int = MAX_ITER) -> StegoSolution:
    LOGGER.info(f'Designing static filter over {p.dictionary.n} compounds, mu={p.mu:g}, {p.regularizer}.')
    result = solve_nonneg_design(p.b, p.e, p.mu, p.regularizer, tol, max_iter, name=f'filter (mu={p.mu:g})')
    solution = design_solution(result, p.b, p.e, p.dictionary.ids, p.mu, p.regularizer)
    LOGGER.info(f'Filter uses {len(solution.support)} compounds, residual {solution.residual_l2:.6g}.')
    return solution


def step_bound(e, w0) -> float:
    '''
    Step size below which the stationary residual has been observed to decrease: 1 / (2 max(w0) sigma_max(E)^2).
    '''
    sigma = numerics.spectral_norm(e)
    largest = float(np.max(w0))
    if sigma == 0 or largest <= 0:
        raise InvalidConfigError('The step bound needs a nonzero E and a positive w0.')
    return 1.0 / (2.0 * largest * sigma ** 2)


def _subgradient(w: np.ndarray, regularizer: str) -> np.ndarray:
    if regularizer == 'l1':
        return np.sign(w)
    if regularizer == 'l2sq':
        return 2.0 * w
    return np.zeros_like(w)


def _update(w: np.ndarray, b: np.ndarray, e: np.ndarray, eta: float, mu: float, regularizer: str) -> Tuple[np.ndarray, int]:
    residual = b + e @ w
    step = w - 2.0 * eta * w * (e.T @ residual + mu * _subgradient(w, regularizer))
    clamped = int(np.sum(step < 0))
    return np.maximum(step, 0.0), clamped


def lms_step(w, x_in, y_des, dictionary: Dictionary, perceptual_map: PerceptualMap, eta: float, mu: float, regularizer: str = 'l1') -> np.ndarray:
    '''
    One multiplicative LMS update, w - 2 eta diag(w) (E^T (A x_in + E w - y_des) + mu dJ(w)), clamped at zero.
    '''
    w = numerics.as_vector(w, 'w')
    if len(w) != dictionary.n:
        raise DimensionMismatchError(f'w has {len(w)} entries but the dictionary has {dictionary.n} compounds.')
    if np.any(w < 0):
        raise InvalidConfigError('LMS weights must be nonnegative.')
    e = dictionary_percepts(perceptual_map, dictionary)
    b = perceptual_map.a @ _check_input(x_in, perceptual_map) - _check_target(y_des, perceptual_map)
    return _update(w, b, e, eta, mu, regularizer)[0]


def run_adaptive(scenario: EnvironmentScenario, dictionary: Dictionary, perceptual_map: PerceptualMap, eta: float, mu: float, w0=None, regularizer: str = 'l1') -> AdaptiveRun:
    '''
    Runs the LMS recurrence over every scenario step. Step t records w_t and the perceptual residual
    ||A x_in,t + E w_t - y_des,t|| before the update.
    '''
    check_regularizer(regularizer)
    if eta <= 0:
        raise InvalidConfigError(f'eta must be positive, got {eta}.')
    if mu < 0:
        raise InvalidConfigError(f'mu must be nonnegative, got {mu}.')
    w = np.full(dictionary.n, 1.0 / dictionary.n) if w0 is None else numerics.as_vector(w0, 'w0').copy()
    if len(w) != dictionary.n:
        raise DimensionMismatchError(f'w0 has {len(w)} entries but the dictionary has {dictionary.n} compounds.')
    if np.any(w <= 0):
        raise FrozenCoordinateError([dictionary.ids[i] for i in np.flatnonzero(w <= 0)])
    for segment in scenario.segments:
        _check_input(segment.x_in, perceptual_map)
        _check_target(segment.y_des, perceptual_map)

    e = dictionary_percepts(perceptual_map, dictionary)
    a = perceptual_map.a
    rng = np.random.default_rng(scenario.seed)
    w_trajectory = np.zeros((scenario.total_steps, dictionary.n))
    residuals = np.zeros(scenario.total_steps)
    clamp_events = 0
    t = 0
    LOGGER.info(f'Adaptive run: {scenario.total_steps} steps in {len(scenario.segments)} segment(s), eta={eta:g}, mu={mu:g}.')

    for segment in scenario.segments:
        for _ in range(segment.steps):
            x_in = segment.x_in
            if scenario.jitter_sigma > 0:
                x_in = x_in + scenario.jitter_sigma * rng.standard_normal(len(x_in))
            b = a @ x_in - segment.y_des
            w_trajectory[t] = w
            residuals[t] = np.linalg.norm(b + e @ w)
            w, clamped = _update(w, b, e, eta, mu, regularizer)
            if clamped:
                LOGGER.debug(f'Step {t}: clamped {clamped} coordinate(s) at zero.')
                clamp_events += clamped
            t += 1

    frozen = [dictionary.ids[i] for i in np.flatnonzero(w == 0)]
    if frozen:
        LOGGER.warning(f'{len(frozen)} coordinate(s) reached zero and stay frozen: {", ".join(frozen)}')
    LOGGER.info(f'Adaptive run finished with residual {residuals[-1]:.6g}.')
    return AdaptiveRun(eta, mu, w_trajectory, residuals, scenario, list(dictionary.ids), clamp_events, frozen)
