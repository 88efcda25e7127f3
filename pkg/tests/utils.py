import os
import sys
import unittest

import numpy as np

TESTS_PATH = os.path.dirname(os.path.realpath(__file__))
REPO_PATH = os.path.dirname(TESTS_PATH)
if REPO_PATH not in sys.path:
    sys.path.insert(0, REPO_PATH)

from patchr0.periodic import PeriodicMatrixFn

DATA_PATH = os.path.join(TESTS_PATH, 'data')
TEMP_PATH = os.path.join(TESTS_PATH, 'tmp')


def path_of_data(filename):
    return os.path.join(DATA_PATH, filename)


def csv_read(filename):
    """Reads a sweep csv, skipping the # footer"""
    return np.genfromtxt(filename, delimiter=',', names=True, comments='#',
                         dtype=None, encoding='utf-8')


def footer_read(filename):
    """The # key=value lines of a sweep csv as a dict"""
    footer = {}
    with open(filename) as fin:
        for line in fin:
            if line.startswith('# '):
                key, value = line[2:].rstrip('\n').split('=', 1)
                footer[key] = value
    return footer


class TempFileManager(object):

    def __init__(self):
        if not os.path.exists(TEMP_PATH):
            os.makedirs(TEMP_PATH)
        self.__files = {}

    def get(self, filename):
        try:
            path = self.__files[filename]
        except KeyError:
            path = os.path.join(TEMP_PATH, filename)
            self.__files[filename] = path
        return path

    def __call__(self, filename=None):
        return self.get(filename)

    def purge(self):
        for path in self.__files.values():
            if os.path.exists(path):
                os.remove(path)
        self.__files = {}


def random_connectivity(rng, n, density=0.5, reducible=False):
    """A random cooperative matrix with zero column sums

    With reducible, patches get random group labels and movement is only
    allowed inside a group or from a lower to a higher group, which
    usually leaves several closed blocks.
    """
    A = rng.uniform(0.1, 2.0, size=(n, n)) * (rng.uniform(size=(n, n)) <
                                              density)
    if reducible:
        group = rng.randint(0, max(2, n // 2), size=n)
        # entry (i, j) moves mass from j to i
        A = A * (group[:, np.newaxis] >= group[np.newaxis, :])
    np.fill_diagonal(A, 0.0)
    return A - np.diag(A.sum(axis=0))


def random_generator(rng, n):
    """Cooperative periodic matrix with entries of order one"""
    entries = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                amplitude = rng.uniform(-0.15, 0.15, size=(2, 2))
                entries[(i, j)] = PeriodicMatrixFn.scalar(
                    rng.uniform(-1.0, 0.5), amplitude[0], amplitude[1])
            else:
                mean = rng.uniform(0.0, 0.3)
                amplitude = rng.uniform(0.0, 0.45 * mean, size=2)
                entries[(i, j)] = PeriodicMatrixFn.scalar(
                    mean, [amplitude[0]], [amplitude[1]])
    return PeriodicMatrixFn.from_entries(n, entries)


class PatchR0TestCase(unittest.TestCase):

    def setUp(self):
        self.__cwd = os.getcwd()
        if not os.path.exists(TEMP_PATH):
            os.makedirs(TEMP_PATH)
        os.chdir(TEMP_PATH)
        self._tmp_files = TempFileManager()

    def tearDown(self):
        self._tmp_files.purge()
        os.chdir(self.__cwd)

    def assertAllClose(self, actual, desired, atol=1e-10, rtol=0.0):
        np.testing.assert_allclose(actual, desired, rtol=rtol, atol=atol)
