import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np

from errors import DimensionMismatchError, DuplicateIdError, InvalidConfigError, NonFiniteError, UnknownCompoundError

LOGGER = logging.getLogger('olfact')


def map_to_objects(rows, constructor):
    return [constructor(**row) for row in rows]


class CompoundRecord:

    def __init__(self, id: str, name: str, features: np.ndarray):
        self.id = id
        self.name = name
        self.features = np.asarray(features, dtype=float)


class PerceptRecord:

    def __init__(self, id: str, scores: np.ndarray):
        self.id = id
        self.scores = np.asarray(scores, dtype=float)


class Dictionary:
    '''
    Compounds available for mixing; column j of features belongs to ids[j].
    '''

    def __init__(self, ids: Sequence[str], features: np.ndarray, names: Sequence[str] = None, feature_names: Sequence[str] = None):
        features = np.array(features, dtype=float)
        if features.ndim != 2:
            raise DimensionMismatchError(f'Dictionary features must be a k x n matrix, got shape {features.shape}.')
        if len(ids) < 1:
            raise DimensionMismatchError('A dictionary needs at least one compound.')
        if features.shape[1] != len(ids):
            raise DimensionMismatchError(f'Dictionary has {len(ids)} ids but {features.shape[1]} feature columns.')
        if not np.all(np.isfinite(features)):
            raise NonFiniteError('Dictionary features contain NaN or Inf entries.')

        self.ids = list(ids)
        self.features = features
        self.names = list(names) if names is not None else list(ids)
        self.feature_names = list(feature_names) if feature_names is not None else [f'f{i + 1}' for i in range(features.shape[0])]
        self.index: Dict[str, int] = {}
        for position, compound_id in enumerate(self.ids):
            if compound_id in self.index:
                raise DuplicateIdError(compound_id)
            self.index[compound_id] = position

    @property
    def k(self) -> int:
        return self.features.shape[0]

    @property
    def n(self) -> int:
        return self.features.shape[1]

    def indices(self, ids: Sequence[str]) -> List[int]:
        missing = [compound_id for compound_id in ids if compound_id not in self.index]
        if missing:
            raise UnknownCompoundError(missing)
        return [self.index[compound_id] for compound_id in ids]

    def column(self, compound_id: str) -> np.ndarray:
        return self.features[:, self.indices([compound_id])[0]]


class IngredientTable:
    '''
    Compound-by-ingredient concentrations; rows follow compound_ids, columns follow ingredient_ids.
    '''

    def __init__(self, ingredient_ids: Sequence[str], compound_ids: Sequence[str], weights: np.ndarray):
        weights = np.array(weights, dtype=float)
        if weights.shape != (len(compound_ids), len(ingredient_ids)):
            raise DimensionMismatchError(f'Ingredient weights have shape {weights.shape}, expected {(len(compound_ids), len(ingredient_ids))}.')
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise InvalidConfigError('Ingredient concentrations must be finite and nonnegative.')
        if len(set(ingredient_ids)) != len(ingredient_ids):
            raise DuplicateIdError(next(i for i in ingredient_ids if list(ingredient_ids).count(i) > 1))

        self.ingredient_ids = list(ingredient_ids)
        self.compound_ids = list(compound_ids)
        self.weights = weights

    def normalized(self) -> 'IngredientTable':
        norms = np.linalg.norm(self.weights, axis=0)
        if np.any(norms == 0):
            empty = [self.ingredient_ids[i] for i in np.flatnonzero(norms == 0)]
            raise InvalidConfigError(f'Ingredient(s) without any concentration: {", ".join(empty)}')
        return IngredientTable(self.ingredient_ids, self.compound_ids, self.weights / norms)


class MixtureSpec:
    '''
    Non-negative weights over named compounds: a smell, a malodor or a designed additive.
    '''

    def __init__(self, entries: Sequence[Tuple[str, float]]):
        entries = [(compound_id, float(weight)) for compound_id, weight in entries]
        if not entries:
            raise InvalidConfigError('A mixture needs at least one entry.')
        if any(not np.isfinite(weight) or weight < 0 for _, weight in entries):
            raise InvalidConfigError('Mixture weights must be finite and nonnegative.')
        if not any(weight > 0 for _, weight in entries):
            raise InvalidConfigError('A mixture needs at least one strictly positive weight.')
        seen = set()
        for compound_id, _ in entries:
            if compound_id in seen:
                raise DuplicateIdError(compound_id)
            seen.add(compound_id)

        self.entries = entries

    @property
    def ids(self) -> List[str]:
        return [compound_id for compound_id, _ in self.entries]

    @property
    def weights(self) -> np.ndarray:
        return np.array([weight for _, weight in self.entries])

    def scaled(self, factor: float) -> 'MixtureSpec':
        return MixtureSpec([(compound_id, weight * factor) for compound_id, weight in self.entries])

    def combined(self, other: 'MixtureSpec') -> 'MixtureSpec':
        '''
        Sum of two mixtures; weights of shared compounds add up.
        '''
        weights = dict(self.entries)
        for compound_id, weight in other.entries:
            weights[compound_id] = weights.get(compound_id, 0.0) + weight
        return MixtureSpec(list(weights.items()))
