import os
import inspect
import hashlib

import numpy as np

import patchr0

PATCHR0_PATH = os.path.dirname(inspect.getfile(patchr0))
REPO_PATH = os.path.join(PATCHR0_PATH, '..')
RESOURCES_PATH = os.path.join(PATCHR0_PATH, 'resources')

WORKERS_ENV_VAR = 'PATCHR0_WORKERS'
RUN_MODE_ENV_VAR = 'PATCHR0_RUN_MODE'

# numerical defaults shared by the whole package
STEPS_PER_PERIOD = 4096
MIN_STEPS_PER_PERIOD = 16
VALIDATION_GRID = 1024
POWER_ITERATION_CAP = 100000
POWER_ITERATION_TOL = 1e-13
MU_FLOOR = 1e-8
MU_CEIL = 1e8
BISECTION_TOL = 1e-9
COLUMN_SUM_TOL = 1e-12
SIGN_TOL = 1e-12

DEFAULT_GRID_SIZE = 61
DEFAULT_GRID_RANGE = (1e-3, 1e3)
DEFAULT_GRID_ANCHORS = (1e4, 1e5)


def get_resource_path(file_name):
    """given the name of a resource, returns the full path"""
    return os.path.join(RESOURCES_PATH, file_name)


def get_workers(default=1):
    """Number of sweep workers, overridden by PATCHR0_WORKERS if set"""
    try:
        workers = int(os.environ[WORKERS_ENV_VAR])
    except (KeyError, ValueError):
        return default
    return max(workers, 1)


def default_d_grid(size=DEFAULT_GRID_SIZE, d_range=DEFAULT_GRID_RANGE,
                   anchors=DEFAULT_GRID_ANCHORS):
    """The default dispersal grid

    Geometric between d_range[0] and d_range[1] (inclusive) with the anchors
    appended for the large dispersal limit checks.

    Returns
    -------
    numpy.ndarray
        Strictly increasing positive rates

    """
    grid = np.geomspace(d_range[0], d_range[1], size)
    extra = [a for a in anchors if a > grid[-1]]
    return np.concatenate((grid, np.array(extra, dtype=float)))


def max_norm(A):
    """Largest absolute entry of A (0 for empty arrays)"""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(A)))


def clamp_small(A, tol):
    """Returns a copy of A with entries of magnitude below tol set to 0"""
    A = np.array(A, dtype=float)
    A[np.abs(A) < tol] = 0.0
    return A


def fmt(value):
    """Locale independent formatting with 12 significant digits"""
    return '{:.12g}'.format(float(value))


def file_hash(path):
    """sha256 of a file's bytes, as hex"""
    digest = hashlib.sha256()
    with open(path, 'rb') as fin:
        for chunk in iter(lambda: fin.read(65536), b''):
            digest.update(chunk)
    return digest.hexdigest()
