"""Model files.

A model file is TOML with a top level ``kind`` and a ``[model]`` table, and
optionally a ``[run]`` table of defaults for the command line. See
doc/file_format.rst for the schema. Every check runs when the file is
loaded; errors name the file and, when it can be found, the line of the
offending key.
"""
from collections import namedtuple
import logging
import re
import tomllib

import numpy as np

from ..errors import (ValidationError, ConfigError, H1Error, H2Error,
                      ModelError)
from ..models.ross_macdonald import (ross_macdonald_params,
                                     disease_free_solution,
                                     build_ross_macdonald)
from ..models.sis import build_sis_autonomous
from ..periodic import PeriodicMatrixFn
from ..reproduction import PeriodicVFProblem
from ..zero_structure import ConnectivityMatrix
from ..utils import STEPS_PER_PERIOD, file_hash, get_resource_path

logger = logging.getLogger(__name__)

BASELINE_FILE = 'baseline_ross_macdonald.toml'


class ModelKind:
    ROSS_MACDONALD = 'ross_macdonald'
    MATRIX = 'matrix'
    SIS = 'sis'
    All = (ROSS_MACDONALD, MATRIX, SIS)


MODEL_KEYS = {
    ModelKind.ROSS_MACDONALD: {
        'required': ('period', 'total_humans', 'migration', 'sigma1',
                     'sigma2', 'gamma', 'mortality', 'recruitment'),
        'optional': ('biting', 'biting_factor')},
    ModelKind.MATRIX: {
        'required': ('connectivity', 'removal', 'infection'),
        'optional': ('period',)},
    ModelKind.SIS: {
        'required': ('beta', 'gamma', 'connectivity'),
        'optional': ('period',)}}

RUN_KEYS = ('d', 'steps_per_period', 'tol', 'grid')
GRID_KEYS = ('start', 'stop', 'num', 'anchors')
SERIES_KEYS = ('c0', 'cos', 'sin')


RunDefaults_ = namedtuple('RunDefaults', ['d', 'steps_per_period', 'tol',
                                          'grid'])


class RunDefaults(RunDefaults_):

    """Values of the optional [run] table (None where absent)

    Attributes
    ----------
    d : float or None
    steps_per_period : int or None
    tol : float or None
    grid : numpy.ndarray or None

    """
    pass


class _Locator(object):

    """Finds the line a key is declared on"""

    def __init__(self, path, text):
        self.__path = path
        self.__lines = text.splitlines()

    def line(self, key):
        if key is None:
            return None
        pattern = re.compile(r'^\s*"?{}"?\s*='.format(re.escape(key)))
        for number, line in enumerate(self.__lines, 1):
            if pattern.match(line):
                return number
        return None

    def error(self, message, key=None, cls=ConfigError):
        line = self.line(key)
        if cls is ConfigError:
            return ConfigError(message, self.__path, line)
        location = self.__path if line is None else '{}:{}'.format(
            self.__path, line)
        return cls('{}: {}'.format(location, message))


class Model(object):

    """A loaded model file

    Parameters
    ----------
    kind : str
        A ModelKind constant
    path : str
    sha256 : str
        Hash of the file's bytes
    run : RunDefaults
    params : RossMacdonaldParams or None
        For ross_macdonald files
    problem : PeriodicVFProblem or None
        For the other kinds, at d = 0

    """

    def __init__(self, kind, path, sha256, run, params=None, problem=None):
        self.__kind = kind
        self.__path = path
        self.__sha256 = sha256
        self.__run = run
        self.__params = params
        self.__problem = problem
        self.__dfs = {}

    def __repr__(self):
        return 'Model({!r}, {!r})'.format(self.__kind, self.__path)

    @property
    def kind(self):
        return self.__kind

    @property
    def path(self):
        return self.__path

    @property
    def sha256(self):
        return self.__sha256

    @property
    def run(self):
        return self.__run

    @property
    def params(self):
        return self.__params

    def problem(self, d=0.0, steps=STEPS_PER_PERIOD):
        """The linear problem at dispersal rate d"""
        if self.__params is None:
            return self.__problem.with_dispersal(d)
        if steps not in self.__dfs:
            self.__dfs[steps] = disease_free_solution(self.__params, steps)
        return build_ross_macdonald(self.__params, d, self.__dfs[steps],
                                    steps)

    def disease_free_solution(self, steps=STEPS_PER_PERIOD):
        if self.__params is None:
            return None
        if steps not in self.__dfs:
            self.__dfs[steps] = disease_free_solution(self.__params, steps)
        return self.__dfs[steps]


def _check_keys(table, required, optional, where, locator):
    for key in required:
        if key not in table:
            raise locator.error('missing key {!r} in {}'.format(key, where))
    for key in table:
        if key not in required and key not in optional:
            raise locator.error('unknown key {!r} in {}'.format(key, where),
                                key)


def _number(value, key, locator):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise locator.error('{} must be a number'.format(key), key)
    return float(value)


def parse_series(value, period, key, locator):
    """A number or a {c0, cos, sin} table as a 1 x 1 PeriodicMatrixFn"""
    if isinstance(value, dict):
        for k in value:
            if k not in SERIES_KEYS:
                raise locator.error('unknown key {!r} in series {}'.format(
                    k, key), key)
        c0 = _number(value.get('c0', 0.0), key, locator)
        cos = [_number(a, key, locator) for a in value.get('cos', [])]
        sin = [_number(b, key, locator) for b in value.get('sin', [])]
        return PeriodicMatrixFn.scalar(c0, cos, sin, period)
    return PeriodicMatrixFn.scalar(_number(value, key, locator),
                                   period=period)


def _series_list(value, period, key, locator):
    if isinstance(value, list):
        return [parse_series(v, period, key, locator) for v in value]
    return [parse_series(value, period, key, locator)]


def _square(value, key, locator):
    if (not isinstance(value, list) or not value or
            not all(isinstance(row, list) and len(row) == len(value)
                    for row in value)):
        raise locator.error('{} must be a square array of rows'.format(key),
                            key)
    return value


def _matrix(value, key, locator):
    rows = _square(value, key, locator)
    return np.array([[_number(x, key, locator) for x in row]
                     for row in rows])


def _periodic_matrix(value, period, key, locator):
    rows = _square(value, key, locator)
    entries = {(i, j): parse_series(x, period, key, locator)
               for i, row in enumerate(rows) for j, x in enumerate(row)}
    return PeriodicMatrixFn.from_entries(len(rows), entries, period)


def _connectivity(value, key, locator):
    try:
        return ConnectivityMatrix(_matrix(value, key, locator))
    except H1Error as e:
        raise locator.error(str(e), key, H1Error)


def _grid(value, locator):
    if isinstance(value, list):
        return np.array([_number(v, 'grid', locator) for v in value])
    if not isinstance(value, dict):
        raise locator.error('grid must be a list or a table', 'grid')
    _check_keys(value, ('start', 'stop', 'num'), ('anchors',), '[run.grid]',
                locator)
    num = value['num']
    if isinstance(num, bool) or not isinstance(num, int) or num < 1:
        raise locator.error('num must be a positive integer', 'num')
    grid = np.geomspace(_number(value['start'], 'start', locator),
                        _number(value['stop'], 'stop', locator), num)
    anchors = [_number(a, 'anchors', locator)
               for a in value.get('anchors', [])]
    return np.concatenate((grid, [a for a in anchors if a > grid[-1]]))


def _run_defaults(table, locator):
    if not isinstance(table, dict):
        raise locator.error('run must be a table', 'run')
    _check_keys(table, (), RUN_KEYS, '[run]', locator)
    d = table.get('d')
    steps = table.get('steps_per_period')
    tol = table.get('tol')
    grid = table.get('grid')
    if steps is not None and (isinstance(steps, bool) or
                              not isinstance(steps, int)):
        raise locator.error('steps_per_period must be an integer',
                            'steps_per_period')
    return RunDefaults(
        None if d is None else _number(d, 'd', locator),
        steps,
        None if tol is None else _number(tol, 'tol', locator),
        None if grid is None else _grid(grid, locator))


def _ross_macdonald(table, locator):
    period = _number(table['period'], 'period', locator)
    if period <= 0.0:
        raise locator.error('period must be positive', 'period', ModelError)
    if ('biting' in table) == ('biting_factor' in table):
        raise locator.error('give exactly one of biting and biting_factor')
    recruitment = _series_list(table['recruitment'], period, 'recruitment',
                               locator)
    if 'biting' in table:
        biting = _series_list(table['biting'], period, 'biting', locator)
    else:
        factor = _number(table['biting_factor'], 'biting_factor', locator)
        biting = [factor * eps for eps in recruitment]
    migration = _connectivity(table['migration'], 'migration', locator)
    values = {}
    for key in ('sigma1', 'sigma2', 'gamma'):
        raw = table[key] if isinstance(table[key], list) else [table[key]]
        values[key] = [_number(x, key, locator) for x in raw]
    try:
        return ross_macdonald_params(
            migration, period, _number(table['total_humans'], 'total_humans',
                                       locator),
            values['sigma1'], values['sigma2'], values['gamma'],
            _series_list(table['mortality'], period, 'mortality', locator),
            recruitment, biting)
    except ModelError as e:
        key = next((k for k in MODEL_KEYS[ModelKind.ROSS_MACDONALD]['required']
                    + ('biting', 'biting_factor') if str(e).startswith(k)),
                   None)
        raise locator.error(str(e), key, ModelError)


def _matrix_problem(table, locator):
    period = _number(table.get('period', 1.0), 'period', locator)
    if period <= 0.0:
        raise locator.error('period must be positive', 'period', ModelError)
    L = _connectivity(table['connectivity'], 'connectivity', locator)
    V = _periodic_matrix(table['removal'], period, 'removal', locator)
    F = _periodic_matrix(table['infection'], period, 'infection', locator)
    try:
        return PeriodicVFProblem(L, V, F)
    except H2Error as e:
        key = 'infection' if str(e).startswith('F') else 'removal'
        raise locator.error(str(e), key, H2Error)
    except ValidationError as e:
        raise locator.error(str(e), 'removal')


def _sis_problem(table, locator):
    period = _number(table.get('period', 1.0), 'period', locator)
    L = _connectivity(table['connectivity'], 'connectivity', locator)
    beta = [_number(x, 'beta', locator) for x in table['beta']]
    gamma = [_number(x, 'gamma', locator) for x in table['gamma']]
    if len(beta) != L.n or len(gamma) != L.n:
        raise locator.error('beta and gamma need {} entries'.format(L.n),
                            'beta')
    try:
        return build_sis_autonomous(beta, gamma, L, 0.0, period)
    except ModelError as e:
        key = 'gamma' if 'recovery' in str(e) else 'beta'
        raise locator.error(str(e), key, ModelError)


def load_model(path):
    """Reads and validates a model file

    Parameters
    ----------
    path : str

    Returns
    -------
    Model

    Raises
    ------
    ConfigError
        on unreadable files, TOML syntax errors and schema violations
    H1Error
        if a connectivity matrix fails (H1)
    H2Error
        if V or F fail (H2)
    ModelError
        on out of range model parameters

    """
    try:
        with open(path, 'rb') as fin:
            raw = fin.read()
    except OSError as e:
        raise ConfigError('cannot read model file: {}'.format(e), path)
    text = raw.decode('utf-8', errors='replace')
    try:
        document = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        match = re.search(r'line (\d+)', str(e))
        raise ConfigError('TOML syntax error: {}'.format(e), path,
                          int(match.group(1)) if match else None)
    locator = _Locator(path, text)
    _check_keys(document, ('kind', 'model'), ('run',), 'the file', locator)
    kind = document['kind']
    if kind not in ModelKind.All:
        raise locator.error('kind must be one of {}, got {!r}'.format(
            ', '.join(ModelKind.All), kind), 'kind')
    table = document['model']
    if not isinstance(table, dict):
        raise locator.error('model must be a table', 'model')
    keys = MODEL_KEYS[kind]
    _check_keys(table, keys['required'], keys['optional'], '[model]',
                locator)
    run = _run_defaults(document.get('run', {}), locator)
    sha256 = file_hash(path)
    logger.debug('loading %s model from %s', kind, path)
    if kind == ModelKind.ROSS_MACDONALD:
        return Model(kind, path, sha256, run,
                     params=_ross_macdonald(table, locator))
    if kind == ModelKind.MATRIX:
        return Model(kind, path, sha256, run,
                     problem=_matrix_problem(table, locator))
    return Model(kind, path, sha256, run,
                 problem=_sis_problem(table, locator))


def baseline_params():
    """The shipped baseline: two patches, T = 365 days, N^H = 500"""
    return load_model(get_resource_path(BASELINE_FILE)).params
