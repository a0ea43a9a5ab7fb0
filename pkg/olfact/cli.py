import argparse
import logging
import os
import sys
from traceback import TracebackException
from typing import Dict, List, Optional

import numpy as np

import corpus.artifact_dao as artifact_dao
import corpus.compound_dao as compound_dao
import corpus.ingredient_dao as ingredient_dao
import corpus.mixture_dao as mixture_dao
import corpus.percept_dao as percept_dao
import corpus.synthetic as synthetic
import exit_codes
from cli_utils import basename, parse_grid
from corpus.mixing import mix, mixture_weights
from defaults import CV_FOLDS, CV_LAMBDA_GRID, DESIGN_TOL, FIT_TOL, MAX_ITER, REGULARIZERS
from errors import InvalidConfigError, OlfactError
from olfact import cancellation, filtering, perceptmap, steganography
from resources import (COMPOUNDS_FILE, COVER_FILE, DICTIONARY_FILE, GROUND_TRUTH_FILE, HIDDEN_FILE, INGREDIENTS_FILE, INPUT_MIXTURE_FILE,
                       MALODOR_FILE_TEMPLATE, PERCEPTS_FILE, SCENARIO_FILE, TARGET_FILE, TOOL_NAME, TOOL_VERSION)

LOGGER = logging.getLogger('olfact')

# Lower bounds of numeric flags: (bound, strict).
PARAMETER_BOUNDS = {
    'mu': (0.0, False),
    'nu': (0.0, False),
    'eta': (0.0, True),
    'tol': (0.0, True),
    'max_iter': (1, False),
    'folds': (2, False),
    'workers': (1, False),
    'noise': (0.0, False),
    'min_coverage': (0.0, False),
    'k': (1, False),
    'l': (1, False),
    'n_train': (1, False),
    'n_dict': (1, False),
    'rank': (1, False),
}


class RunConfig:
    '''
    Everything one subcommand run depends on. Its echo is embedded in every artifact the run writes.
    '''

    def __init__(self, subcommand: str, inputs: Dict[str, object], outputs: Dict[str, Optional[str]], params: Dict[str, object], seed: int):
        self.subcommand = subcommand
        self.inputs = inputs
        self.outputs = outputs
        self.params = params
        self.seed = seed

    def validate(self):
        for name, value in self.inputs.items():
            for path in value if isinstance(value, list) else [value]:
                if path is not None and not os.path.isfile(path):
                    raise InvalidConfigError(f'Input file for --{name.replace("_", "-")} not found: {path}')
        for name, (bound, strict) in PARAMETER_BOUNDS.items():
            value = self.params.get(name)
            if value is None:
                continue
            if value < bound or (strict and value == bound):
                raise InvalidConfigError(f'--{name.replace("_", "-")} must be {">" if strict else ">="} {bound}, got {value}.')
        if self.params.get('min_coverage', 0.0) > 1:
            raise InvalidConfigError('--min-coverage must not exceed 1.')
        if self.params.get('rank') is not None and self.params['rank'] > min(self.params['k'], self.params['l']):
            raise InvalidConfigError(f'--rank must not exceed min(--k, --l) = {min(self.params["k"], self.params["l"])}.')

    def echo(self) -> dict:
        def names(value):
            return [basename(path) for path in value] if isinstance(value, list) else basename(value)

        return {
            'tool': TOOL_NAME,
            'version': TOOL_VERSION,
            'subcommand': self.subcommand,
            'inputs': {name: names(value) for name, value in self.inputs.items()},
            'outputs': {name: basename(path) for name, path in self.outputs.items()},
            'params': self.params,
            'seed': self.seed,
        }


def cmd_fit_map(config: RunConfig):
    features, percepts = config.inputs['features'], config.inputs['percepts']
    params = config.params
    compounds = compound_dao.load_compounds(features)
    x, y, _ = percept_dao.training_matrices(compounds, percept_dao.load_percepts(percepts))
    grid = parse_grid(params['lambda_grid'])

    report = perceptmap.cross_validate(x, y, grid, params['folds'], config.seed, params['tol'], params['max_iter'], params['standardize'], params['workers'])
    fitted = perceptmap.fit(x, y, report.best_lambda, params['tol'], params['max_iter'], params['standardize'],
                            descriptors=percept_dao.load_descriptors(percepts), feature_names=compound_dao.load_feature_names(features))
    artifact_dao.save_cv(config.outputs['out_cv'], report, config.echo())
    artifact_dao.save_map(config.outputs['out_map'], fitted, config.echo())
    LOGGER.info(f'Fitted map at lambda {report.best_lambda:g}: rank {perceptmap.rank_of(fitted)}, train RMSE {fitted.train_rmse:.6g}.')


def cmd_predict(config: RunConfig):
    perceptual_map = artifact_dao.load_map(config.inputs['map'])
    dictionary = compound_dao.load_dictionary(config.inputs['dict'])
    spec = mixture_dao.load_mixture(config.inputs['mixture'])
    percept = perceptmap.predict_mixture(perceptual_map, dictionary, spec, config.params['normalize'])

    out = config.outputs['out']
    percept_dao.save_percept_vector(out, perceptual_map.descriptors, percept)
    artifact_dao.save_meta(out, config.echo())
    most, least = perceptmap.top_descriptors(percept, perceptual_map.descriptors)
    LOGGER.info(f'Most applicable: {", ".join(name for name, _ in most)}; least applicable: {", ".join(name for name, _ in least)}.')


def cmd_design_cancel(config: RunConfig):
    params = config.params
    perceptual_map = artifact_dao.load_map(config.inputs['map'])
    dictionary = compound_dao.load_dictionary(config.inputs['dict'])
    malodor_paths = config.inputs['malodor']
    malodors = [mixture_dao.load_mixture(path) for path in malodor_paths]
    y_mal = np.column_stack([perceptmap.predict_mixture(perceptual_map, dictionary, spec, params['normalize']) for spec in malodors])

    problem = cancellation.CancellationProblem(y_mal, dictionary, perceptual_map, params['mu'], params['white_family'], [basename(path) for path in malodor_paths])
    solution = cancellation.solve_cancellation(problem, params['tol'], params['max_iter'])
    report = cancellation.whiteness_report(problem, solution)
    whiteness = {'support_size': report.support_size, 'span_rank': report.span_rank, 'intensity_ratio': report.intensity_ratio}
    artifact_dao.save_cancellation(config.outputs['out'], dictionary.ids, solution, config.echo(), whiteness)
    if (pca_path := config.outputs.get('pca')) is not None:
        artifact_dao.save_pca(pca_path, cancellation.pca_points(problem, solution), config.echo())


def cmd_design_stego(config: RunConfig):
    params = config.params
    perceptual_map = artifact_dao.load_map(config.inputs['map'])
    dictionary = compound_dao.load_dictionary(config.inputs['dict'])
    hidden_dictionary = compound_dao.load_dictionary(config.inputs['hidden_dict']) if config.inputs.get('hidden_dict') else dictionary
    hidden = mixture_dao.load_mixture(config.inputs['hidden'])
    ingredients = None
    if (ingredients_path := config.inputs.get('ingredients')) is not None:
        ingredients = ingredient_dao.load_ingredients(ingredients_path, dictionary, params['min_coverage'])

    problem = steganography.StegoProblem(hidden, hidden_dictionary, dictionary, perceptual_map, params['nu'], params['reg'], ingredients)
    solution = steganography.solve_stego(problem, params['tol'], params['max_iter'])
    extra = {'basis': 'ingredients' if ingredients is not None else 'compounds', 'hidden_normalized': True}
    if (cover_path := config.inputs.get('cover')) is not None:
        hidden_residual, distance = steganography.verify_hiding(problem, solution, mixture_dao.load_mixture(cover_path), hidden_dictionary)
        extra['verification'] = {'hidden_residual': hidden_residual, 'combined_vs_cover_distance': distance}
    artifact_dao.save_design(config.outputs['out'], solution, config.echo(), extra)


def cmd_design_filter(config: RunConfig):
    params = config.params
    perceptual_map = artifact_dao.load_map(config.inputs['map'])
    dictionary = compound_dao.load_dictionary(config.inputs['dict'])
    x_in = mix(dictionary, mixture_dao.load_mixture(config.inputs['input_mixture']), params['normalize'])
    y_des = percept_dao.load_percept_vector(config.inputs['target'], perceptual_map.descriptors)

    problem = filtering.FilterProblem(x_in, y_des, dictionary, perceptual_map, params['mu'], params['reg'])
    solution = filtering.solve_filter(problem, params['tol'], params['max_iter'])
    artifact_dao.save_design(config.outputs['out'], solution, config.echo(), {'basis': 'compounds'})


def initial_weights(w0: str, dictionary) -> Optional[np.ndarray]:
    '''
    --w0 uniform (1/n everywhere), ones, or a mixture file over the dictionary compounds.
    '''
    if w0 == 'uniform':
        return None
    if w0 == 'ones':
        return np.ones(dictionary.n)
    if not os.path.isfile(w0):
        raise InvalidConfigError(f'--w0 must be uniform, ones or an existing mixture file, got {w0}.')
    return mixture_weights(dictionary, mixture_dao.load_mixture(w0))


def cmd_adapt(config: RunConfig):
    params = config.params
    perceptual_map = artifact_dao.load_map(config.inputs['map'])
    dictionary = compound_dao.load_dictionary(config.inputs['dict'])
    scenario = artifact_dao.load_scenario(config.inputs['scenario'])
    w0 = initial_weights(params['w0'], dictionary)

    run = filtering.run_adaptive(scenario, dictionary, perceptual_map, params['eta'], params['mu'], w0, params['reg'])
    artifact_dao.save_run(config.outputs['out'], run, config.echo())


def cmd_synth_data(config: RunConfig):
    params = config.params
    out_dir = config.outputs['out_dir']
    os.makedirs(out_dir, exist_ok=True)

    compounds, percepts, dictionary, a0 = synthetic.generate_synthetic(config.seed, params['k'], params['l'], params['n_train'], params['n_dict'], params['rank'], params['noise'])
    demo = synthetic.generate_demo_mixtures(config.seed, dictionary, a0)
    descriptors = synthetic.descriptor_names(params['l'])

    def target(name):
        return os.path.join(out_dir, name)

    compound_dao.save_compounds(target(COMPOUNDS_FILE), compounds, dictionary.feature_names)
    percept_dao.save_percepts(target(PERCEPTS_FILE), percepts, descriptors)
    compound_dao.save_dictionary(target(DICTIONARY_FILE), dictionary)
    artifact_dao.save_ground_truth(target(GROUND_TRUTH_FILE), a0, config.echo())
    for position, malodor in enumerate(demo.malodors):
        mixture_dao.save_mixture(target(MALODOR_FILE_TEMPLATE.format(position + 1)), malodor)
    mixture_dao.save_mixture(target(HIDDEN_FILE), demo.hidden)
    mixture_dao.save_mixture(target(COVER_FILE), demo.cover)
    ingredient_dao.save_ingredient_rows(target(INGREDIENTS_FILE), demo.ingredient_rows)
    artifact_dao.save_scenario(target(SCENARIO_FILE), demo.scenario)
    mixture_dao.save_mixture(target(INPUT_MIXTURE_FILE), demo.input_mixture)
    percept_dao.save_percept_vector(target(TARGET_FILE), descriptors, demo.target)
    artifact_dao.save_meta(target(COMPOUNDS_FILE), config.echo())
    LOGGER.info(f'Synthetic data written to {out_dir}.')


# subcommand: (handler, input flags, output flags)
SUBCOMMANDS = {
    'fit-map': (cmd_fit_map, ['features', 'percepts'], ['out_map', 'out_cv']),
    'predict': (cmd_predict, ['map', 'dict', 'mixture'], ['out']),
    'design-cancel': (cmd_design_cancel, ['map', 'dict', 'malodor'], ['out', 'pca']),
    'design-stego': (cmd_design_stego, ['map', 'dict', 'hidden', 'hidden_dict', 'ingredients', 'cover'], ['out']),
    'design-filter': (cmd_design_filter, ['map', 'dict', 'input_mixture', 'target'], ['out']),
    'adapt': (cmd_adapt, ['map', 'dict', 'scenario'], ['out']),
    'synth-data': (cmd_synth_data, [], ['out_dir']),
}


def _solver_flags(parser: argparse.ArgumentParser, tol: float):
    parser.add_argument('--tol', type=float, default=tol)
    parser.add_argument('--max-iter', type=int, default=MAX_ITER)
    parser.add_argument('--seed', type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL_NAME, description='Olfactory signal processing: perceptual maps, odor cancellation, food steganography and filtering.')
    parser.add_argument('--version', action='version', version=f'{TOOL_NAME} {TOOL_VERSION}')
    commands = parser.add_subparsers(dest='subcommand', required=True)

    fit_map = commands.add_parser('fit-map', help='Learn the perceptual map with cross-validated nuclear norm regression.')
    fit_map.add_argument('--features', required=True)
    fit_map.add_argument('--percepts', required=True)
    fit_map.add_argument('--lambda-grid', default=CV_LAMBDA_GRID)
    fit_map.add_argument('--folds', type=int, default=CV_FOLDS)
    fit_map.add_argument('--workers', type=int, default=1)
    fit_map.add_argument('--standardize', action='store_true')
    fit_map.add_argument('--out-map', required=True)
    fit_map.add_argument('--out-cv', required=True)
    _solver_flags(fit_map, FIT_TOL)

    predict = commands.add_parser('predict', help='Predict the percept of a mixture.')
    predict.add_argument('--map', required=True)
    predict.add_argument('--dict', required=True)
    predict.add_argument('--mixture', required=True)
    predict.add_argument('--normalize', action='store_true')
    predict.add_argument('--out', required=True)
    predict.add_argument('--seed', type=int, default=0)

    cancel = commands.add_parser('design-cancel', help='Design a sparse compound set that cancels malodors.')
    cancel.add_argument('--map', required=True)
    cancel.add_argument('--dict', required=True)
    cancel.add_argument('--malodor', action='append', required=True)
    cancel.add_argument('--mu', type=float, required=True)
    cancel.add_argument('--white-family', action='store_true')
    cancel.add_argument('--normalize', action='store_true')
    cancel.add_argument('--pca')
    cancel.add_argument('--out', required=True)
    _solver_flags(cancel, DESIGN_TOL)

    stego = commands.add_parser('design-stego', help='Design an additive that hides a food inside any cover.')
    stego.add_argument('--map', required=True)
    stego.add_argument('--dict', required=True)
    stego.add_argument('--hidden', required=True)
    stego.add_argument('--hidden-dict')
    stego.add_argument('--ingredients')
    stego.add_argument('--min-coverage', type=float, default=0.0)
    stego.add_argument('--cover')
    stego.add_argument('--nu', type=float, required=True)
    stego.add_argument('--reg', choices=REGULARIZERS, default='l1')
    stego.add_argument('--out', required=True)
    _solver_flags(stego, DESIGN_TOL)

    design_filter = commands.add_parser('design-filter', help='Design compounds steering an input smell to a target percept.')
    design_filter.add_argument('--map', required=True)
    design_filter.add_argument('--dict', required=True)
    design_filter.add_argument('--input-mixture', required=True)
    design_filter.add_argument('--target', required=True)
    design_filter.add_argument('--normalize', action='store_true')
    design_filter.add_argument('--mu', type=float, required=True)
    design_filter.add_argument('--reg', choices=REGULARIZERS, default='l1')
    design_filter.add_argument('--out', required=True)
    _solver_flags(design_filter, DESIGN_TOL)

    adapt = commands.add_parser('adapt', help='Run the adaptive LMS filter over an environment scenario.')
    adapt.add_argument('--map', required=True)
    adapt.add_argument('--dict', required=True)
    adapt.add_argument('--scenario', required=True)
    adapt.add_argument('--eta', type=float, required=True)
    adapt.add_argument('--mu', type=float, default=0.0)
    adapt.add_argument('--w0', default='uniform')
    adapt.add_argument('--reg', choices=REGULARIZERS, default='l1')
    adapt.add_argument('--out', required=True)
    adapt.add_argument('--seed', type=int, default=0)

    synth = commands.add_parser('synth-data', help='Write a seeded synthetic corpus with demo mixtures and a scenario.')
    synth.add_argument('--seed', type=int, default=0)
    synth.add_argument('--k', type=int, default=18)
    synth.add_argument('--l', type=int, default=20)
    synth.add_argument('--n-train', type=int, default=60)
    synth.add_argument('--n-dict', type=int, default=200)
    synth.add_argument('--rank', type=int, default=3)
    synth.add_argument('--noise', type=float, default=0.5)
    synth.add_argument('--out-dir', required=True)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    _, input_flags, output_flags = SUBCOMMANDS[args.subcommand]
    values = vars(args)
    inputs = {flag: values.get(flag) for flag in input_flags}
    outputs = {flag: values.get(flag) for flag in output_flags}
    params = {name: value for name, value in values.items() if name not in input_flags + output_flags + ['subcommand', 'seed']}
    return RunConfig(args.subcommand, inputs, outputs, params, args.seed)


def main(argv: List[str] = None) -> int:
    '''
    Runs one subcommand and returns its exit code.
    '''
    args = build_parser().parse_args(sys.argv[1:] if argv is None else argv)
    LOGGER.info(f'Starting {args.subcommand}.')
    try:
        config = config_from_args(args)
        config.validate()
        SUBCOMMANDS[args.subcommand][0](config)
    except OlfactError as error:
        LOGGER.error(f'!!! {args.subcommand} failed: {error} !!!')
        LOGGER.info(''.join(TracebackException(type(error), error, error.__traceback__, limit=None).format(chain=True)))
        print(f'{TOOL_NAME}: error: {error}', file=sys.stderr)
        return error.exit_code
    except OSError as error:
        LOGGER.error(f'!!! {args.subcommand} could not access a file: {error} !!!')
        print(f'{TOOL_NAME}: error: {error}', file=sys.stderr)
        return exit_codes.CONFIG_ERROR

    LOGGER.info(f'Finished {args.subcommand}.')
    return exit_codes.SUCCESS
