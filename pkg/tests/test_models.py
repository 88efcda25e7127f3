import unittest

import numpy as np

from patchr0.errors import ModelError, PreconditionError
from patchr0.fetch.config import baseline_params
from patchr0.models import (ross_macdonald_params, averaged_params,
                            disease_free_solution, build_ross_macdonald,
                            patch_ratios, build_sis_autonomous)
from patchr0.periodic import PeriodicMatrixFn
from patchr0.reproduction import r0_periodic, r0_reduced, r0_time_averaged

from utils import PatchR0TestCase

# headline values of the two patch baseline
R0_PATCH = (1.5340, 1.4478)
R0_REDUCED = 1.5028
R0_AVERAGED = 1.3555
TOL = 2e-3


class TestRossMacdonald(PatchR0TestCase):

    @classmethod
    def setUpClass(cls):
        cls.params = baseline_params()
        cls.dfs = disease_free_solution(cls.params)

    def test_baseline_params(self):
        params = self.params
        self.assertEqual(params.m, 2)
        self.assertEqual(params.period, 365.0)
        self.assertAllClose(params.gamma, [0.02, 0.02])
        # biting is 0.028 times recruitment
        self.assertAllClose(params.biting[0].cos[:, 0, 0], [-0.14, -0.14])

    def test_disease_free_solution(self):
        self.assertAllClose(self.dfs.Hstar, [250.0, 250.0])
        for v in self.dfs.Vstar:
            # constant mortality: mean V* = mean recruitment / mortality
            self.assertAlmostEqual(v.c0[0, 0], 125.0, places=6)
            self.assertTrue(v.is_positive())
        self.assertEqual(self.dfs.samples.shape, (4096, 2))

    def test_problem_structure(self):
        problem = build_ross_macdonald(self.params, 1.0, self.dfs)
        self.assertEqual(problem.n, 4)
        # only humans move
        self.assertFalse(np.any(problem.L.L[2:, :]))
        self.assertFalse(np.any(problem.L.L[:, 2:]))
        V_bar, F_bar = problem.averaged
        self.assertAllClose(np.diag(V_bar), [0.02, 0.02, 0.1, 0.1])
        self.assertAlmostEqual(F_bar[0, 2], 0.07)
        self.assertAlmostEqual(F_bar[2, 0], 0.0525)

    def test_patch_ratios(self):
        ratios = patch_ratios(self.params, self.dfs)
        self.assertAlmostEqual(ratios[0], R0_PATCH[0], delta=TOL)
        self.assertAlmostEqual(ratios[1], R0_PATCH[1], delta=TOL)

    def test_single_patch(self):
        p = self.params
        single = ross_macdonald_params(
            [[0.0]], p.period, self.dfs.Hstar[0], p.sigma1[0], p.sigma2[0],
            p.gamma[0], p.mortality[0], p.recruitment[0], p.biting[0])
        problem = build_ross_macdonald(single, 1.0)
        self.assertEqual(problem.n, 2)
        self.assertAlmostEqual(r0_periodic(problem).value,
                               patch_ratios(p, self.dfs)[0], delta=1e-6)

    def test_reduced_ratio(self):
        problem = build_ross_macdonald(self.params, 0.0, self.dfs)
        self.assertAlmostEqual(r0_reduced(problem).value, R0_REDUCED,
                               delta=TOL)

    def test_time_averaged_ratio(self):
        problem = build_ross_macdonald(self.params, 0.0, self.dfs)
        values = [r0_time_averaged(problem.with_dispersal(d))
                  for d in (0.0, 0.01, 100.0)]
        self.assertAlmostEqual(values[0], R0_AVERAGED, delta=TOL)
        self.assertAlmostEqual(values[0], np.sqrt(0.07 * 0.0525 / 0.002))
        self.assertAllClose(values, values[0], atol=1e-9)

    def test_averaged_params(self):
        flat = averaged_params(self.params)
        for series in flat.recruitment + flat.biting + flat.mortality:
            self.assertTrue(series.is_constant())
        self.assertAlmostEqual(flat.biting[0].c0[0, 0], 0.35)


class TestParameterChecks(PatchR0TestCase):

    def params(self, **overrides):
        kwargs = dict(migration=[[-1.0, 1.0], [1.0, -1.0]], period=365.0,
                      total_humans=500.0, sigma1=0.2, sigma2=0.3,
                      gamma=0.02, mortality=0.1, recruitment=12.5,
                      biting=0.35)
        kwargs.update(overrides)
        return ross_macdonald_params(**kwargs)

    def test_broadcast(self):
        params = self.params()
        self.assertEqual(len(params.recruitment), 2)
        self.assertAllClose(params.sigma2, [0.3, 0.3])

    def test_rejects(self):
        self.assertRaises(ModelError, self.params, sigma1=1.5)
        self.assertRaises(ModelError, self.params, gamma=[0.02, 0.0])
        self.assertRaises(ModelError, self.params, gamma=[0.1, 0.2, 0.3])
        self.assertRaises(ModelError, self.params, total_humans=-1.0)
        self.assertRaises(
            ModelError, self.params,
            recruitment=PeriodicMatrixFn.scalar(1.0, cos=[2.0], period=365))

    def test_reducible_migration(self):
        params = self.params(migration=np.zeros((2, 2)))
        self.assertRaises(PreconditionError, disease_free_solution, params,
                          256)

    def test_constant_model(self):
        params = self.params()
        dfs = disease_free_solution(params)
        for v in dfs.Vstar:
            self.assertEqual(v.harmonics, 0)
            self.assertAlmostEqual(v.c0[0, 0], 125.0, places=6)


class TestSis(PatchR0TestCase):

    def test_build(self):
        problem = build_sis_autonomous([3.0, 1.0], [1.0, 1.0],
                                       [[-1.0, 2.0], [1.0, -2.0]], 2.0)
        self.assertEqual(problem.d, 2.0)
        self.assertAllClose(problem.F.mean(), np.diag([3.0, 1.0]))

    def test_rejects(self):
        L = [[-1.0, 2.0], [1.0, -2.0]]
        self.assertRaises(ModelError, build_sis_autonomous, [1.0, 1.0],
                          [1.0, 0.0], L)
        self.assertRaises(ModelError, build_sis_autonomous, [-1.0, 1.0],
                          [1.0, 1.0], L)
        self.assertRaises(ModelError, build_sis_autonomous, [1.0],
                          [1.0, 1.0], L)


if __name__ == '__main__':
    unittest.main()
