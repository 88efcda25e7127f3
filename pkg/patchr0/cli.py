"""Command line front end.

usage: patchr0 COMMAND [MODEL] [options]

Commands are ``reduce``, ``eig``, ``r0``, ``sweep`` and
``reproduce-figure1``. Exit status is 0 on success, 1 when the input is
rejected and 2 when a computation fails.
"""
from collections import namedtuple
import argparse
import logging
import logging.config
import sys

import numpy as np

from .asymptotics import SweepOptions, sweep, figure_shape
from .errors import PatchR0Error, ValidationError, ConfigError
from .export import csv as csv_export
from .export.report import (reduce_report, eig_report, r0_report, Check,
                            check_report)
from .fetch.config import load_model, ModelKind, BASELINE_FILE
from .models.ross_macdonald import patch_ratios
from .periodic import principal_eigenvalue
from .reproduction import r0_periodic, r0_time_averaged
from .zero_structure import build_basis
from .utils import (STEPS_PER_PERIOD, BISECTION_TOL, get_resource_path,
                    default_d_grid, fmt)

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = range(3)
LOGGING_CONF = 'default_logging.cfg'

# published values the baseline reproduction is checked against
FIGURE_TOL = 2e-3
FIGURE_VALUES = (('R0 of isolated patch 1', 1.5340),
                 ('R0 of isolated patch 2', 1.4478),
                 ('R0 of the aggregated system', 1.5028),
                 ('R0 of the time averaged model', 1.3555))
SMALL_D_TOL = 0.01
LARGE_D_TOL = 0.005


class Command:
    REDUCE = 'reduce'
    EIG = 'eig'
    R0 = 'r0'
    SWEEP = 'sweep'
    REPRODUCE_FIGURE1 = 'reproduce-figure1'
    All = (REDUCE, EIG, R0, SWEEP, REPRODUCE_FIGURE1)
    needs_d = (EIG, R0)
    needs_grid = (SWEEP, REPRODUCE_FIGURE1)


RunConfig_ = namedtuple('RunConfig', ['command', 'model_source', 'd',
                                      'd_grid', 'steps_per_period', 'tol',
                                      'output_path'])


class RunConfig(RunConfig_):

    """A fully resolved command line invocation

    Attributes
    ----------
    command : str
        A Command constant
    model_source : str
        Model file path
    d : float or None
        Dispersal rate, set for eig and r0 only
    d_grid : numpy.ndarray or None
        Dispersal grid, set for sweep and reproduce-figure1 only
    steps_per_period : int
    tol : float
        Bisection tolerance
    output_path : str or None
        Where sweeps write csv; stdout when None

    """
    pass


def parse_grid(text):
    """``start:stop:num`` (geometric) or a comma separated list of rates"""
    try:
        if ':' in text:
            start, stop, num = text.split(':')
            return np.geomspace(float(start), float(stop), int(num))
        return np.array([float(x) for x in text.split(',')])
    except ValueError:
        raise ConfigError('cannot parse grid {!r}; use start:stop:num or a '
                          'comma separated list'.format(text))


def build_parser():
    parser = argparse.ArgumentParser(
        prog='patchr0',
        description='Principal eigenvalues and basic reproduction ratios '
                    'of periodic patch models')
    parser.add_argument('command', choices=Command.All)
    parser.add_argument('model', nargs='?', default=None,
                        help='model file (reproduce-figure1 defaults to the '
                             'shipped baseline)')
    parser.add_argument('--d', type=float, default=None,
                        help='dispersal rate for eig and r0')
    parser.add_argument('--grid', default=None,
                        help='dispersal grid for sweep: start:stop:num or '
                             'a comma separated list')
    parser.add_argument('--steps', type=int, default=None,
                        help='Runge-Kutta steps per period')
    parser.add_argument('--tol', type=float, default=None,
                        help='relative bisection tolerance for R0')
    parser.add_argument('--output', '-o', default=None,
                        help='csv file for sweep results')
    parser.add_argument('--logging-conf', default=None,
                        help='logging.config file')
    parser.add_argument('--verbose', '-v', action='store_true')
    return parser


def parse_config(path, command=Command.REDUCE, d=None, grid=None,
                 steps=None, tol=None, output=None):
    """Loads the model file and resolves the run settings

    Command line values win over the file's [run] table, which wins over
    the package defaults.

    Returns
    -------
    tuple (RunConfig, patchr0.fetch.config.Model)

    Raises
    ------
    ValidationError
        from the model file, or when eig / r0 get no dispersal rate

    """
    model = load_model(path)
    defaults = model.run
    if steps is None:
        steps = defaults.steps_per_period or STEPS_PER_PERIOD
    if tol is None:
        tol = defaults.tol or BISECTION_TOL
    d_value = None
    d_grid = None
    if command in Command.needs_d:
        d_value = d if d is not None else defaults.d
        if d_value is None:
            raise ConfigError('{} needs a dispersal rate (--d or d in '
                              '[run])'.format(command), path)
    elif command in Command.needs_grid:
        if grid is not None:
            d_grid = np.asarray(grid, dtype=float)
        elif defaults.grid is not None:
            d_grid = defaults.grid
        else:
            d_grid = default_d_grid()
    return (RunConfig(command, path, d_value, d_grid, int(steps), float(tol),
                      output),
            model)


def _reduce(config, model):
    problem = model.problem(0.0, config.steps_per_period)
    basis = build_basis(problem.L)
    print(reduce_report(problem.L, basis))
    return EXIT_OK


def _eig(config, model):
    problem = model.problem(config.d, config.steps_per_period)
    value = principal_eigenvalue(problem.L, problem.F - problem.V, config.d,
                                 config.steps_per_period)
    print(eig_report(config.d, value))
    return EXIT_OK


def _r0(config, model):
    problem = model.problem(config.d, config.steps_per_period)
    result = r0_periodic(problem, config.tol, config.steps_per_period)
    print(r0_report(config.d, result))
    return EXIT_OK


def _options(config):
    default = SweepOptions.default()
    return default._replace(steps_per_period=config.steps_per_period,
                            tol=config.tol)


def _sweep(config, model):
    problem = model.problem(0.0, config.steps_per_period)
    result = sweep(problem, config.d_grid, _options(config))
    csv_export.write_sweep(result, config.output_path,
                           {'config_sha256': model.sha256})
    return EXIT_OK


def _reproduce_figure1(config, model):
    if model.kind != ModelKind.ROSS_MACDONALD:
        raise ConfigError('reproduce-figure1 needs a ross_macdonald model',
                          model.path)
    steps, tol = config.steps_per_period, config.tol
    dfs = model.disease_free_solution(steps)
    ratios = patch_ratios(model.params, dfs, tol, steps)
    problem = model.problem(0.0, steps)
    result = sweep(problem, config.d_grid, _options(config))
    if config.output_path is not None:
        csv_export.write_sweep(result, config.output_path,
                               {'config_sha256': model.sha256})
    averaged = r0_time_averaged(problem.with_dispersal(1.0))
    computed = list(ratios[:2]) + [result.limits.r0_tilde, averaged]
    checks = [Check(label, value, expected, FIGURE_TOL)
              for (label, expected), value in zip(FIGURE_VALUES, computed)]
    r0 = result.r0_values
    checks.append(Check('R0 at d = {}'.format(fmt(result.d_grid[0])), r0[0],
                        FIGURE_VALUES[0][1], SMALL_D_TOL))
    checks.append(Check('R0 at d = {}'.format(fmt(result.d_grid[-1])),
                        r0[-1], result.limits.r0_tilde, LARGE_D_TOL))
    shape = figure_shape(r0)
    notes = ['R0(d) decreases, increases, then decreases: {}'.format(
        'PASS' if shape.decreases_increases_decreases() else 'FAIL')]
    notes += ['  local minimum at d = {}'.format(fmt(result.d_grid[k]))
              for k in shape.minima]
    notes += ['  local maximum at d = {}'.format(fmt(result.d_grid[k]))
              for k in shape.maxima]
    print(check_report('Ross-Macdonald baseline', checks, notes))
    passed = (all(c.passed for c in checks) and
              shape.decreases_increases_decreases())
    return EXIT_OK if passed else EXIT_NUMERICAL


COMMANDS = {Command.REDUCE: _reduce,
            Command.EIG: _eig,
            Command.R0: _r0,
            Command.SWEEP: _sweep,
            Command.REPRODUCE_FIGURE1: _reproduce_figure1}


def exit_code(error):
    if isinstance(error, ValidationError):
        return EXIT_VALIDATION
    return EXIT_NUMERICAL


def run(config, model=None):
    """Executes a RunConfig, printing its report

    Returns
    -------
    int
        The exit status

    """
    try:
        if model is None:
            config, model = parse_config(
                config.model_source, config.command, config.d,
                config.d_grid, config.steps_per_period, config.tol,
                config.output_path)
        status = COMMANDS[config.command](config, model)
    except PatchR0Error as e:
        logger.error('%s', e)
        print('error [{}]: {}'.format(e.code, e), file=sys.stderr)
        return exit_code(e)
    return status


def setup_logging(logging_conf_file=None, verbose=False):
    if logging_conf_file is None:
        logging_conf_file = get_resource_path(LOGGING_CONF)
    logging.config.fileConfig(logging_conf_file,
                              disable_existing_loggers=False)
    if verbose:
        logging.getLogger('patchr0').setLevel(logging.DEBUG)
        for handler in logging.getLogger().handlers:
            handler.setLevel(logging.DEBUG)


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logging(args.logging_conf, args.verbose)
    model_path = args.model
    if model_path is None:
        if args.command != Command.REPRODUCE_FIGURE1:
            print('error [schema]: {} needs a model file'.format(args.command),
                  file=sys.stderr)
            return EXIT_VALIDATION
        model_path = get_resource_path(BASELINE_FILE)
    try:
        grid = None if args.grid is None else parse_grid(args.grid)
        config, model = parse_config(model_path, args.command, args.d, grid,
                                     args.steps, args.tol, args.output)
    except PatchR0Error as e:
        print('error [{}]: {}'.format(e.code, e), file=sys.stderr)
        return exit_code(e)
    return run(config, model)


if __name__ == '__main__':
    sys.exit(main())
