import logging
from math import sqrt
from typing import List, Tuple

import numpy as np

from corpus.data_objects import CompoundRecord, Dictionary, MixtureSpec, PerceptRecord
from corpus.mixing import mix
from defaults import PERCEPT_MAX, PERCEPT_MIN
from errors import InvalidConfigError

LOGGER = logging.getLogger('olfact')

# The first feature acts as a size descriptor close to 1 for every rated compound; through it the
# map carries a baseline percept around INTERCEPT, which keeps clean percepts inside [0, 100].
INTERCEPT = 50.0
INTERCEPT_JITTER = 0.1
SIZE_JITTER = 0.05
SIZE_LOADING_SPREAD = 0.5
# Standard deviation of the percept variation contributed by the remaining rank-1 components.
PERCEPT_SPREAD = 6.0

DICTIONARY_SERIAL_OFFSET = 50000


class DemoMixtures:

    def __init__(self, malodors: List[MixtureSpec], hidden: MixtureSpec, cover: MixtureSpec, ingredient_rows: List[Tuple[str, str, str]], scenario: dict, input_mixture: MixtureSpec, target: np.ndarray):
        self.malodors = malodors
        self.hidden = hidden
        self.cover = cover
        self.ingredient_rows = ingredient_rows
        self.scenario = scenario
        self.input_mixture = input_mixture
        self.target = target


def cas_like_id(serial: int) -> str:
    '''
    A CAS-registry-style key with a valid check digit.
    '''
    body = f'{serial // 100 + 100}{serial % 100:02d}'
    check = sum((position + 1) * int(digit) for position, digit in enumerate(reversed(body))) % 10
    return f'{body[:-2]}-{body[-2:]}-{check}'


def descriptor_names(l: int) -> List[str]:
    return [f'd{i + 1}' for i in range(l)]


def feature_names(k: int) -> List[str]:
    return [f'f{i + 1}' for i in range(k)]


def ground_truth(rng: np.random.Generator, k: int, l: int, true_rank: int) -> np.ndarray:
    '''
    Rank true_rank map: one baseline component loaded on the size feature plus true_rank - 1 spread components.
    '''
    u = np.zeros((l, true_rank))
    v = np.zeros((k, true_rank))
    u[:, 0] = 1.0 + INTERCEPT_JITTER * rng.standard_normal(l)
    v[0, 0] = INTERCEPT
    if k > 1:
        v[1:, 0] = SIZE_LOADING_SPREAD * rng.standard_normal(k - 1)
        spread = PERCEPT_SPREAD / sqrt(max(true_rank - 1, 1) * (k - 1))
        for component in range(1, true_rank):
            u[:, component] = rng.standard_normal(l)
            v[1:, component] = spread * rng.standard_normal(k - 1)
    return u @ v.T


def generate_synthetic(seed: int, k: int, l: int, n_train: int, n_dict: int, true_rank: int, noise_sigma: float):
    '''
    Seeded stand-in for rated compounds, their percepts and a dictionary of food volatiles.

    Returns (compounds, percepts, dictionary, ground_truth_map) with
    percepts = clip(ground_truth_map X + noise, 0, 100). Dictionary compounds come from a broader,
    centered feature distribution, so their predicted percepts take both signs.
    '''
    if min(k, l, n_train, n_dict, true_rank) < 1:
        raise InvalidConfigError('All counts must be at least 1.')
    if true_rank > min(k, l):
        raise InvalidConfigError(f'true_rank {true_rank} exceeds min(k, l) = {min(k, l)}.')
    if noise_sigma < 0:
        raise InvalidConfigError(f'noise_sigma must be nonnegative, got {noise_sigma}.')

    rng = np.random.default_rng(seed)
    a0 = ground_truth(rng, k, l, true_rank)

    x_train = rng.standard_normal((k, n_train))
    x_train[0, :] = 1.0 + SIZE_JITTER * rng.standard_normal(n_train)
    noise = noise_sigma * rng.standard_normal((l, n_train))
    y_train = np.clip(a0 @ x_train + noise, PERCEPT_MIN, PERCEPT_MAX)

    x_dict = rng.standard_normal((k, n_dict))

    compounds = [CompoundRecord(cas_like_id(i), f'rated compound {i + 1}', x_train[:, i]) for i in range(n_train)]
    percepts = [PerceptRecord(compound.id, y_train[:, i]) for i, compound in enumerate(compounds)]
    dictionary = Dictionary([cas_like_id(DICTIONARY_SERIAL_OFFSET + j) for j in range(n_dict)], x_dict, [f'volatile {j + 1}' for j in range(n_dict)], feature_names(k))

    LOGGER.info(f'Generated synthetic corpus: seed {seed}, k={k}, l={l}, {n_train} rated compounds, {n_dict} dictionary compounds, rank {true_rank}.')
    return compounds, percepts, dictionary, a0


def _random_mixture(rng: np.random.Generator, dictionary: Dictionary, size: int) -> MixtureSpec:
    chosen = rng.choice(dictionary.n, size=min(size, dictionary.n), replace=False)
    weights = np.round(rng.lognormal(mean=-2.0, sigma=1.0, size=len(chosen)), 4) + 0.0001
    return MixtureSpec([(dictionary.ids[j], float(weight)) for j, weight in zip(sorted(chosen), weights)])


def _concentration_text(rng: np.random.Generator) -> str:
    kind = rng.random()
    value = rng.lognormal(mean=0.0, sigma=1.0)
    if kind < 0.15:
        return 'trace'
    if kind < 0.3:
        return f'{value:.4f}..{value * 2:.4f}'
    return f'{value:.4f}'


def generate_demo_mixtures(seed: int, dictionary: Dictionary, a0: np.ndarray, n_malodors: int = 4, malodor_size: int = 8,
                           hidden_size: int = 21, cover_size: int = 10, n_ingredients: int = 12, segment_steps: int = 400) -> DemoMixtures:
    '''
    Malodors, a hidden food, a cover food, an ingredient table and a drifting-source scenario over a dictionary.
    '''
    if n_malodors < 1 or segment_steps < 1:
        raise InvalidConfigError('Need at least one malodor and one step per segment.')

    rng = np.random.default_rng([seed, 1])
    malodors = [_random_mixture(rng, dictionary, malodor_size) for _ in range(n_malodors)]
    hidden = _random_mixture(rng, dictionary, hidden_size)
    cover = _random_mixture(rng, dictionary, cover_size)

    ingredient_rows = []
    for i in range(n_ingredients):
        members = rng.choice(dictionary.n, size=min(int(rng.integers(5, 16)), dictionary.n), replace=False)
        for j in sorted(members):
            ingredient_rows.append((f'INGREDIENT {i + 1}', dictionary.ids[j], _concentration_text(rng)))

    l = a0.shape[0]
    segments = [{'steps': segment_steps, 'x_in': mix(dictionary, malodor).tolist(), 'y_des': [0.0] * l} for malodor in malodors[:3]]
    scenario = {'segments': segments, 'seed': seed, 'jitter_sigma': 0.0}

    target = a0 @ mix(dictionary, cover, normalize=True)
    return DemoMixtures(malodors, hidden, cover, ingredient_rows, scenario, hidden, target)
