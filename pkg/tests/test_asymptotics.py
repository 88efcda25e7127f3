import os
import unittest

import numpy as np

from patchr0.errors import PreconditionError
from patchr0.asymptotics import (RunMode, get_run_mode, reduced_eigenvalue,
                                 lambda_tilde, evaluate_point, SweepOptions,
                                 sweep, verify_limits, figure_shape)
from patchr0.linalg import is_irreducible, spectral_bound
from patchr0.models.sis import build_sis_autonomous
from patchr0.periodic import (PeriodicMatrixFn, principal_eigenvalue,
                              principal_eigenfunction, aggregation_residual)
from patchr0.reproduction import PeriodicVFProblem
from patchr0.zero_structure import build_basis, aggregate
from patchr0.utils import RUN_MODE_ENV_VAR

from utils import PatchR0TestCase, random_connectivity, random_generator

INTRO_L = np.array([[-1.0, 2.0], [1.0, -2.0]])


def intro_problem():
    return build_sis_autonomous([3.0, 1.0], [1.0, 1.0], INTRO_L)


def irreducible_connectivity(rng, n):
    """Random irreducible (H1) matrix scaled to max row sum 2"""
    while True:
        L = random_connectivity(rng, n, 0.6)
        if is_irreducible(L):
            return 2.0 * L / np.max(np.sum(np.abs(L), axis=1))


class TestReducedEigenvalue(PatchR0TestCase):

    def test_intro_model(self):
        M = PeriodicMatrixFn.constant(np.diag([2.0, 0.0]))
        self.assertAlmostEqual(lambda_tilde(INTRO_L, M), 4.0 / 3.0,
                               places=10)

    def test_block_decomposition(self):
        L = np.array([[-3.0, 0.0, 0.0, 0.0],
                      [1.0, -1.0, 2.0, 0.0],
                      [0.0, 1.0, -2.0, 0.0],
                      [2.0, 0.0, 0.0, 0.0]])
        A = np.array([[-1.0, 0.2, 0.0, 0.1],
                      [0.3, -2.0, 0.4, 0.0],
                      [0.0, 0.5, -1.0, 0.2],
                      [0.1, 0.0, 0.3, -0.5]])
        M = PeriodicMatrixFn.constant(A)
        result = reduced_eigenvalue(L, M)
        expected = spectral_bound(aggregate(build_basis(L), A))
        self.assertAlmostEqual(result.value, expected, places=9)
        self.assertAlmostEqual(max(result.block_values), result.value,
                               places=8)
        self.assertEqual(sorted(i for b in result.blocks for i in b),
                         [0, 1])


class TestSweep(PatchR0TestCase):

    def setUp(self):
        PatchR0TestCase.setUp(self)
        self.__run_mode = os.environ.get(RUN_MODE_ENV_VAR)

    def tearDown(self):
        if self.__run_mode is None:
            os.environ.pop(RUN_MODE_ENV_VAR, None)
        else:
            os.environ[RUN_MODE_ENV_VAR] = self.__run_mode
        PatchR0TestCase.tearDown(self)

    def test_run_mode(self):
        os.environ[RUN_MODE_ENV_VAR] = 'luigi'
        self.assertEqual(get_run_mode(), RunMode.LUIGI)
        os.environ[RUN_MODE_ENV_VAR] = ''
        self.assertEqual(get_run_mode(), RunMode.DBG)

    def test_intro_sweep(self):
        grid = [1e-4, 1.0, 1e5]
        options = SweepOptions(4096, 1e-9, 1, RunMode.DBG)
        result = sweep(intro_problem(), grid, options)
        limits = result.limits
        self.assertAlmostEqual(limits.lambda_at0, 2.0, places=9)
        self.assertAlmostEqual(limits.lambda_tilde, 4.0 / 3.0, places=9)
        self.assertAlmostEqual(limits.r0_at0, 3.0, places=7)
        self.assertAlmostEqual(limits.r0_tilde, 7.0 / 3.0, places=7)
        self.assertTrue(all(p.h3_ok for p in result.points))
        # R0 decreases from 3 to 7/3 as patches mix
        self.assertTrue(np.all(np.diff(result.r0_values) < 0.0))
        report = verify_limits(result)
        self.assertTrue(report.passed)
        frame = result.to_dataframe()
        self.assertEqual(list(frame.columns),
                         ['d', 'lambda', 'r0', 'h3_ok', 'agg_residual'])
        self.assertEqual(len(frame), 3)

    def test_luigi_matches_serial(self):
        grid = [0.1, 10.0]
        problem = intro_problem()
        serial = sweep(problem, grid, SweepOptions(1024, 1e-9, 1,
                                                   RunMode.DBG))
        parallel = sweep(problem, grid, SweepOptions(1024, 1e-9, 1,
                                                     RunMode.LUIGI))
        np.testing.assert_array_equal(serial.r0_values, parallel.r0_values)
        np.testing.assert_array_equal(serial.lambda_values,
                                      parallel.lambda_values)

    def test_threshold_crossing(self):
        # R0 falls from 1.2 to 0.9 as the patches mix
        problem = build_sis_autonomous([1.2, 0.3], [1.0, 1.0], INTRO_L)
        options = SweepOptions(1024, 1e-9, 1, RunMode.DBG)
        result = sweep(problem, np.geomspace(1e-2, 1e2, 17), options)
        lam = result.lambda_values
        r0 = result.r0_values
        self.assertLess(np.max(np.abs(np.diff(lam))), 0.5)
        self.assertGreater(r0[0], 1.0)
        self.assertLess(r0[-1], 1.0)
        for value, ratio in zip(lam, r0):
            if abs(ratio - 1.0) > 1e-6:
                self.assertEqual(np.sign(value), np.sign(ratio - 1.0))

    def test_bad_grid(self):
        problem = intro_problem()
        self.assertRaises(PreconditionError, sweep, problem, [])
        self.assertRaises(PreconditionError, sweep, problem, [1.0, 0.5])
        self.assertRaises(PreconditionError, sweep, problem, [0.0, 1.0])

    def test_limits_need_wide_grid(self):
        options = SweepOptions(256, 1e-6, 1, RunMode.DBG)
        result = sweep(intro_problem(), [0.1, 1.0], options)
        self.assertRaises(PreconditionError, verify_limits, result)

    def test_failed_point(self):
        problem = PeriodicVFProblem(np.zeros((1, 1)),
                                    PeriodicMatrixFn.scalar(0.0),
                                    PeriodicMatrixFn.scalar(1.0))
        point = evaluate_point(problem, 1.0, build_basis(np.zeros((1, 1))),
                               256)
        self.assertFalse(point.h3_ok)
        self.assertTrue(np.isnan(point.r0))
        self.assertIsNotNone(point.error)


class TestLargeDispersal(PatchR0TestCase):

    def test_random_instances(self):
        rng = np.random.RandomState(2)
        for trial in range(20):
            n = rng.randint(2, 7)
            L = irreducible_connectivity(rng, n)
            M = random_generator(rng, n)
            basis = build_basis(L)
            target = lambda_tilde(L, M)
            self.assertLess(abs(principal_eigenvalue(L, M, 1e5) - target),
                            1e-3)
            near = aggregation_residual(
                basis, principal_eigenfunction(L, M, 1e3))
            far = aggregation_residual(
                basis, principal_eigenfunction(L, M, 1e5))
            self.assertGreaterEqual(near, 5.0 * far)
            self.assertLess(far, 1e-3)

    def test_very_large_dispersal(self):
        rng = np.random.RandomState(4)
        for trial in range(10):
            n = rng.randint(2, 6)
            if trial % 2:
                L = random_connectivity(rng, n, 0.6, reducible=True)
                scale = np.max(np.sum(np.abs(L), axis=1))
                if scale == 0.0:
                    continue
                L = 2.0 * L / scale
            else:
                L = irreducible_connectivity(rng, n)
            M = random_generator(rng, n)
            # the limit is the largest eigenvalue over the closed blocks
            target = reduced_eigenvalue(L, M).value
            self.assertLess(abs(principal_eigenvalue(L, M, 1e6) - target),
                            1e-3)


class TestFigureShape(PatchR0TestCase):

    def test_shape(self):
        shape = figure_shape([3.0, 2.0, 1.0, 2.0, 3.0, 2.0, 1.0])
        self.assertEqual(shape.minima, (2,))
        self.assertEqual(shape.maxima, (4,))
        self.assertTrue(shape.decreases_increases_decreases())
        monotone = figure_shape([3.0, 2.0, np.nan, 1.0])
        self.assertEqual(monotone, ((), ()))
        self.assertFalse(monotone.decreases_increases_decreases())


if __name__ == '__main__':
    unittest.main()
