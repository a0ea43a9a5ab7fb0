import json
import logging
from typing import List, Sequence, Tuple

import numpy as np

from corpus.csv_store import change, format_real
from errors import DimensionMismatchError, ParseError
from olfact.cancellation import CancellationSolution
from olfact.filtering import AdaptiveRun, EnvironmentScenario, ScenarioSegment
from olfact.perceptmap import CvReport, PerceptualMap
from olfact.steganography import StegoSolution
from resources import META_SUFFIX

LOGGER = logging.getLogger('olfact')


def write_json(path: str, document: dict):
    '''
    Writes a JSON document with a stable layout (two-space indent, trailing newline).
    '''
    with open(path, 'w', encoding='utf-8', newline='\n') as json_file:
        json_file.write(json.dumps(document, indent=2) + '\n')
    LOGGER.info(f'Wrote {path}.')


def read_json(path: str) -> dict:
    try:
        with open(path, encoding='utf-8') as json_file:
            document = json.load(json_file)
    except json.JSONDecodeError as error:
        raise ParseError(f'invalid JSON: {error.msg}', path, error.lineno)
    if not isinstance(document, dict):
        raise ParseError('expected a JSON object', path)
    return document


def _field(document: dict, key: str, path: str):
    if key not in document:
        raise ParseError(f'missing field "{key}"', path)
    return document[key]


def _floats(values) -> List[float]:
    return [float(value) for value in values]


def save_meta(path: str, echo: dict, **details):
    '''
    Config echo sidecar for a CSV artifact: <path>.meta.json.
    '''
    write_json(path + META_SUFFIX, {'config': echo, **details})


def save_map(path: str, perceptual_map: PerceptualMap, echo: dict = None):
    write_json(path, {
        'k': perceptual_map.k,
        'l': perceptual_map.l,
        'lambda': perceptual_map.lam,
        'a': _floats(perceptual_map.a.ravel()),
        'singular_values': _floats(perceptual_map.singular_values),
        'train_rmse': perceptual_map.train_rmse,
        'descriptors': perceptual_map.descriptors,
        'feature_names': perceptual_map.feature_names,
        'standardize': perceptual_map.standardize,
        'feature_scale': _floats(perceptual_map.feature_scale),
        'iterations': perceptual_map.iterations,
        'kkt_residual': perceptual_map.kkt_residual,
        'config': echo,
    })


def load_map(path: str) -> PerceptualMap:
    '''
    Reads map.json; the matrix is stored row-major under "a".
    '''
    document = read_json(path)
    k = int(_field(document, 'k', path))
    l = int(_field(document, 'l', path))
    values = _field(document, 'a', path)
    if len(values) != k * l:
        raise DimensionMismatchError(f'{path}: "a" has {len(values)} entries, expected {l} x {k}.')
    a = np.array(values, dtype=float).reshape(l, k)
    if not np.all(np.isfinite(a)):
        raise ParseError('map contains non-finite entries', path)
    return PerceptualMap(a, _field(document, 'lambda', path), _field(document, 'singular_values', path), _field(document, 'train_rmse', path),
                         document.get('descriptors'), document.get('feature_names'), document.get('standardize', False),
                         document.get('feature_scale'), document.get('iterations', 0), document.get('kkt_residual', 0.0))


def save_cv(path: str, report: CvReport, echo: dict = None):
    write_json(path, {
        'lambda_grid': _floats(report.lambda_grid),
        'fold_rmse': [_floats(row) for row in report.fold_rmse],
        'mean_rmse': _floats(report.mean_rmse),
        'best_lambda': report.best_lambda,
        'fold_rank': [[int(value) for value in row] for row in report.fold_rank],
        'folds': report.folds,
        'seed': report.seed,
        'config': echo,
    })


def load_cv(path: str) -> CvReport:
    document = read_json(path)
    return CvReport(_field(document, 'lambda_grid', path), _field(document, 'fold_rmse', path), _field(document, 'mean_rmse', path),
                    _field(document, 'best_lambda', path), _field(document, 'fold_rank', path), _field(document, 'folds', path), _field(document, 'seed', path))


def save_cancellation(path: str, ids: Sequence[str], solution: CancellationSolution, echo: dict = None, whiteness: dict = None):
    weights = {compound_id: _floats(solution.w[i]) for i, compound_id in enumerate(ids) if np.any(solution.w[i] > 0)}
    write_json(path, {
        'weights': weights,
        'support': solution.support,
        'residual_frobenius': solution.residual_frobenius,
        'residual_per_odor': _floats(solution.residual_per_odor),
        'white_offset': None if solution.white_offset is None else _floats(solution.white_offset),
        'mu': solution.mu,
        'kkt_residual': solution.kkt_residual,
        'iterations': solution.iterations,
        'objective': solution.objective,
        'whiteness': whiteness,
        'config': echo,
    })


def save_design(path: str, solution: StegoSolution, echo: dict = None, extra: dict = None):
    '''
    stego-solution.json, also used for static filter designs.
    '''
    document = {
        'weights': {entry_id: float(solution.weights[i]) for i, entry_id in enumerate(solution.ids) if solution.weights[i] > 0},
        'support': solution.support,
        'residual_l2': solution.residual_l2,
        'objective': solution.objective,
        'regularizer': solution.regularizer,
        'weight': solution.weight,
        'kkt_residual': solution.kkt_residual,
        'iterations': solution.iterations,
    }
    document.update(extra or {})
    document['config'] = echo
    write_json(path, document)


def load_design_weights(path: str, ids: Sequence[str]) -> np.ndarray:
    '''
    Weight vector of a saved design laid out over ids; entries not listed are zero.
    '''
    weights = _field(read_json(path), 'weights', path)
    unknown = set(weights) - set(ids)
    if unknown:
        raise DimensionMismatchError(f'{path}: weights for unknown entries {", ".join(sorted(unknown))}')
    return np.array([float(weights.get(entry_id, 0.0)) for entry_id in ids])


def scenario_document(scenario: EnvironmentScenario) -> dict:
    segments = [{'steps': segment.steps, 'x_in': _floats(segment.x_in), 'y_des': _floats(segment.y_des)} for segment in scenario.segments]
    return {'segments': segments, 'seed': scenario.seed, 'jitter_sigma': scenario.jitter_sigma}


def save_scenario(path: str, document: dict):
    write_json(path, document)


def load_scenario(path: str) -> EnvironmentScenario:
    document = read_json(path)
    segments = []
    for position, segment in enumerate(_field(document, 'segments', path)):
        try:
            segments.append(ScenarioSegment(int(segment['steps']), segment['x_in'], segment['y_des']))
        except (KeyError, TypeError):
            raise ParseError(f'segment {position + 1} needs steps, x_in and y_des', path)
    return EnvironmentScenario(segments, int(document.get('seed', 0)), float(document.get('jitter_sigma', 0.0)))


def save_run(path: str, run: AdaptiveRun, echo: dict = None):
    '''
    run.csv: t, residual, w_1..w_n per step, plus its meta sidecar.
    '''
    header = ['t', 'residual'] + [f'w_{i + 1}' for i in range(len(run.ids))]
    rows = [[t, format_real(run.residual_trajectory[t])] + [format_real(value) for value in run.w_trajectory[t]] for t in range(len(run.residual_trajectory))]
    change(path, header, rows)
    save_meta(path, echo, compounds=run.ids, clamp_events=run.clamp_events, frozen=run.frozen)


def save_pca(path: str, points: Sequence[Tuple[str, str, float, float]], echo: dict = None):
    change(path, ['kind', 'id', 'pc1', 'pc2'], [[kind, point_id, format_real(pc1), format_real(pc2)] for kind, point_id, pc1, pc2 in points])
    save_meta(path, echo)


def save_ground_truth(path: str, a0: np.ndarray, echo: dict = None):
    write_json(path, {'k': a0.shape[1], 'l': a0.shape[0], 'a': _floats(a0.ravel()), 'config': echo})
