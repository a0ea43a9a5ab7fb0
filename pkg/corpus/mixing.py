import numpy as np

from corpus.data_objects import Dictionary, MixtureSpec


def mixture_weights(dictionary: Dictionary, spec: MixtureSpec, normalize: bool = False) -> np.ndarray:
    '''
    Spreads the mixture weights over all dictionary columns; optionally rescaled to unit l2 norm first.
    '''
    positions = dictionary.indices(spec.ids)
    weights = spec.weights
    if normalize:
        weights = weights / np.linalg.norm(weights)
    spread = np.zeros(dictionary.n)
    spread[positions] = weights
    return spread


def mix(dictionary: Dictionary, spec: MixtureSpec, normalize: bool = False) -> np.ndarray:
    '''
    Physicochemical vector of a mixture: the weighted sum of its compounds' feature columns.
    '''
    positions = dictionary.indices(spec.ids)
    weights = spec.weights
    if normalize:
        weights = weights / np.linalg.norm(weights)
    return dictionary.features[:, positions] @ weights
