import logging
from typing import List, Tuple

import numpy as np

import olfact.numerics as numerics
from corpus.data_objects import Dictionary, IngredientTable, MixtureSpec
from corpus.mixing import mix
from defaults import ACTIVITY_THRESHOLD, DESIGN_TOL, MAX_ITER, REGULARIZERS
from errors import DimensionMismatchError, InvalidConfigError
from olfact.perceptmap import PerceptualMap, dictionary_percepts
from olfact.solver import ProximalResult, accelerated_proximal_gradient

LOGGER = logging.getLogger('olfact')


class StegoProblem:
    '''
    A hidden food whose percept an additive must cancel. The additive is built from dictionary compounds,
    or from ingredients when an ingredient table is given.
    '''

    def __init__(self, hidden: MixtureSpec, hidden_dictionary: Dictionary, dictionary: Dictionary, perceptual_map: PerceptualMap,
                 nu: float, regularizer: str = 'l1', ingredients: IngredientTable = None):
        check_regularizer(regularizer)
        if nu < 0:
            raise InvalidConfigError(f'nu must be nonnegative, got {nu}.')
        if hidden_dictionary.k != perceptual_map.k:
            raise DimensionMismatchError(f'Hidden food dictionary has {hidden_dictionary.k} features but the map expects {perceptual_map.k}.')

        self.hidden = hidden
        self.hidden_dictionary = hidden_dictionary
        self.dictionary = dictionary
        self.perceptual_map = perceptual_map
        self.nu = float(nu)
        self.regularizer = regularizer
        self.ingredients = ingredients
        self.basis = compose_dictionary(dictionary, ingredients) if ingredients is not None else dictionary
        self.hidden_features = mix(hidden_dictionary, hidden, normalize=True)
        self.b = perceptual_map.a @ self.hidden_features
        self.e = dictionary_percepts(perceptual_map, self.basis)


class StegoSolution:

    def __init__(self, weights: np.ndarray, ids: List[str], support: List[str], residual_l2: float, objective: float, kkt_residual: float, iterations: int, weight: float, regularizer: str):
        self.weights = weights
        self.ids = ids
        self.support = support
        self.residual_l2 = residual_l2
        self.objective = objective
        self.kkt_residual = kkt_residual
        self.iterations = iterations
        self.weight = weight
        self.regularizer = regularizer

    def as_mixture(self) -> MixtureSpec:
        return MixtureSpec([(self.ids[i], float(self.weights[i])) for i in np.flatnonzero(self.weights > 0)])


def check_regularizer(regularizer: str):
    if regularizer not in REGULARIZERS:
        raise InvalidConfigError(f'Unknown regularizer {regularizer}; expected one of {", ".join(REGULARIZERS)}.')


def compose_dictionary(dictionary: Dictionary, ingredients: IngredientTable) -> Dictionary:
    '''
    Ingredients as dictionary entries: X_dict W_ingr, one column per ingredient.
    '''
    if ingredients.compound_ids != dictionary.ids:
        raise DimensionMismatchError('The ingredient table is not laid out over the dictionary compounds.')
    return Dictionary(ingredients.ingredient_ids, dictionary.features @ ingredients.weights, feature_names=dictionary.feature_names)


def penalty_value(w: np.ndarray, weight: float, regularizer: str) -> float:
    if regularizer == 'l1':
        return weight * float(np.sum(w))
    if regularizer == 'l2sq':
        return weight * float(w @ w)
    return 0.0


def solve_nonneg_design(b: np.ndarray, e: np.ndarray, weight: float, regularizer: str, tol: float = DESIGN_TOL, max_iter: int = MAX_ITER,
                        w_start: np.ndarray = None, name: str = 'design') -> ProximalResult:
    '''
    Minimizes ||b + E w||^2 + weight J(w) over w >= 0 for J in l1, l2sq or none.
    '''
    check_regularizer(regularizer)

    def smooth(w):
        r = b + e @ w
        return float(r @ r)

    def gradient(w):
        return 2.0 * (e.T @ (b + e @ w))

    def prox(v, step):
        if regularizer == 'l1':
            return numerics.prox_nonneg_l1(v, weight * step)
        if regularizer == 'l2sq':
            return numerics.prox_nonneg_l2sq(v, weight * step)
        return numerics.project_nonneg(v)

    def penalty(w):
        return penalty_value(w, weight, regularizer)

    start = np.zeros(e.shape[1]) if w_start is None else numerics.project_nonneg(w_start)
    return accelerated_proximal_gradient(smooth, gradient, prox, penalty, start, 2.0 * numerics.spectral_norm(e) ** 2, tol, max_iter, name=name)


def design_solution(result: ProximalResult, b: np.ndarray, e: np.ndarray, ids: List[str], weight: float, regularizer: str) -> StegoSolution:
    w = result.x
    largest = float(np.max(w)) if w.size else 0.0
    support = sorted(ids[i] for i in np.flatnonzero(w > ACTIVITY_THRESHOLD * largest)) if largest > 0 else []
    residual = float(np.linalg.norm(b + e @ w))
    return StegoSolution(w, list(ids), support, residual, result.objective, result.kkt_residual, result.iterations, weight, regularizer)


def l1_zero_threshold(p: StegoProblem) -> float:
    '''
    Smallest nu for which the l1-regularized additive is empty: 2 max((-E^T b)+).
    '''
    return 2.0 * float(np.max(numerics.project_nonneg(-(p.e.T @ p.b))))


def solve_stego(p: StegoProblem, tol: float = DESIGN_TOL, max_iter: int = MAX_ITER) -> StegoSolution:
    LOGGER.info(f'Designing steganographic additive over {p.basis.n} {"ingredients" if p.ingredients is not None else "compounds"}, nu={p.nu:g}, {p.regularizer}.')
    result = solve_nonneg_design(p.b, p.e, p.nu, p.regularizer, tol, max_iter, name=f'stego (nu={p.nu:g})')
    solution = design_solution(result, p.b, p.e, p.basis.ids, p.nu, p.regularizer)
    LOGGER.info(f'Additive has {len(solution.support)} active entries, hidden residual {solution.residual_l2:.6g}.')
    return solution


def verify_hiding(p: StegoProblem, sol: StegoSolution, cover: MixtureSpec, cover_dictionary: Dictionary = None) -> Tuple[float, float]:
    '''
    (hidden residual, distance between cover + hidden + additive and the cover alone). Under the linear map
    both are the same number whatever the cover.
    '''
    if len(sol.weights) != p.basis.n:
        raise DimensionMismatchError(f'Additive has {len(sol.weights)} weights but the problem has {p.basis.n} entries.')
    cover_features = mix(cover_dictionary or p.hidden_dictionary, cover)
    additive_features = p.basis.features @ sol.weights
    a = p.perceptual_map.a
    hidden_residual = float(np.linalg.norm(p.b + p.e @ sol.weights))
    served = a @ (cover_features + p.hidden_features + additive_features)
    distance = float(np.linalg.norm(served - a @ cover_features))
    return hidden_residual, distance
