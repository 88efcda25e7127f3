import contextlib
import filecmp
import io
import unittest

import numpy as np

from patchr0.cli import (Command, EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL,
                         parse_config, parse_grid, exit_code, main)
from patchr0.errors import (ConfigError, H1Error, H2Error,
                            InconsistencyError)
from patchr0.fetch.config import ModelKind, load_model
from patchr0.reproduction import PeriodicVFProblem
from patchr0.utils import get_resource_path, file_hash

from utils import PatchR0TestCase, path_of_data, csv_read, footer_read


def run_main(argv):
    """Runs the command line, returning (exit code, stdout, stderr)"""
    out = io.StringIO()
    err = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        status = main(argv)
    return status, out.getvalue(), err.getvalue()


def report_value(text, key):
    for line in text.splitlines():
        if line.startswith(key + ' = '):
            return line.split(' = ', 1)[1]
    raise KeyError(key)


class TestConfig(PatchR0TestCase):

    def test_baseline(self):
        config, model = parse_config(
            get_resource_path('baseline_ross_macdonald.toml'), Command.SWEEP)
        self.assertEqual(model.kind, ModelKind.ROSS_MACDONALD)
        self.assertEqual(model.params.m, 2)
        self.assertEqual(len(config.d_grid), 63)
        # R0 at the first point must sit on the isolated patch value
        self.assertAlmostEqual(config.d_grid[0], 1e-5)
        self.assertEqual(config.d_grid[-1], 1e5)
        self.assertIsNone(config.d)
        self.assertEqual(config.steps_per_period, 4096)

    def test_matrix_model(self):
        config, model = parse_config(path_of_data('matrix_model.toml'),
                                     Command.R0)
        self.assertEqual(model.kind, ModelKind.MATRIX)
        self.assertIsInstance(model.problem(), PeriodicVFProblem)
        self.assertEqual(config.d, 0.5)
        self.assertIsNone(config.d_grid)
        self.assertEqual(config.steps_per_period, 1024)
        config, model = parse_config(path_of_data('matrix_model.toml'),
                                     Command.R0, d=2.0, steps=512)
        self.assertEqual(config.d, 2.0)
        self.assertEqual(config.steps_per_period, 512)

    def test_h1_line(self):
        path = path_of_data('bad_h1.toml')
        with self.assertRaises(H1Error) as context:
            load_model(path)
        self.assertIn('{}:7:'.format(path), str(context.exception))

    def test_h2_line(self):
        path = path_of_data('negative_infection.toml')
        with self.assertRaises(H2Error) as context:
            load_model(path)
        self.assertIn('{}:6:'.format(path), str(context.exception))

    def test_schema_errors(self):
        with self.assertRaises(ConfigError) as context:
            load_model(path_of_data('unknown_key.toml'))
        self.assertEqual(context.exception.line, 7)
        self.assertIn('alpha', str(context.exception))
        with self.assertRaises(ConfigError) as context:
            load_model(path_of_data('bad_syntax.toml'))
        self.assertIsNotNone(context.exception.line)
        self.assertRaises(ConfigError, load_model,
                          path_of_data('no_such_file.toml'))

    def test_missing_rate(self):
        self.assertRaises(ConfigError, parse_config,
                          path_of_data('zero_infection.toml'), Command.EIG)

    def test_parse_grid(self):
        self.assertEqual(len(parse_grid('1e-3:1e3:7')), 7)
        self.assertAlmostEqual(parse_grid('1e-3:1e3:7')[3], 1.0)
        np.testing.assert_array_equal(parse_grid('0.5,2'), [0.5, 2.0])
        self.assertRaises(ConfigError, parse_grid, '1:x')


class TestCommands(PatchR0TestCase):

    def test_reduce(self):
        status, out, err = run_main(['reduce',
                                     get_resource_path('intro_sis.toml')])
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(report_value(out, 'alpha0'), '1')

    def test_eig_large_dispersal(self):
        status, out, err = run_main(['eig',
                                     get_resource_path('intro_sis.toml'),
                                     '--d', '1e5'])
        self.assertEqual(status, EXIT_OK)
        self.assertAlmostEqual(float(report_value(out, 'lambda*')),
                               4.0 / 3.0, delta=1e-3)

    def test_r0_without_infection(self):
        status, out, err = run_main(['r0',
                                     path_of_data('zero_infection.toml'),
                                     '--d', '1'])
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(report_value(out, 'R0'), '0')
        self.assertEqual(report_value(out, 'case'), 'P2-degenerate')

    def test_validation_exit_code(self):
        status, out, err = run_main(['reduce', path_of_data('bad_h1.toml')])
        self.assertEqual(status, EXIT_VALIDATION)
        self.assertIn('error [H1]', err)
        status, out, err = run_main(['sweep'])
        self.assertEqual(status, EXIT_VALIDATION)
        self.assertEqual(exit_code(InconsistencyError('eigen-solve failed')),
                         EXIT_NUMERICAL)

    def test_sweep_csv(self):
        model_path = path_of_data('matrix_model.toml')
        outputs = [self._tmp_files('sweep_{}.csv'.format(k))
                   for k in range(2)]
        for output in outputs:
            status, out, err = run_main(['sweep', model_path, '--steps',
                                         '256', '--output', output])
            self.assertEqual(status, EXIT_OK)
        self.assertTrue(filecmp.cmp(outputs[0], outputs[1], shallow=False))
        with open(outputs[0]) as fin:
            self.assertEqual(fin.readline().strip(),
                             'd,lambda,r0,h3_ok,agg_residual')
        rows = csv_read(outputs[0])
        np.testing.assert_allclose(rows['d'], [1e-4, 1.0, 1e5])
        footer = footer_read(outputs[0])
        self.assertEqual(footer['config_sha256'], file_hash(model_path))
        for key in ('lambda_at0', 'lambda_tilde', 'r0_at0', 'r0_tilde'):
            self.assertIn(key, footer)
        self.assertAlmostEqual(rows['r0'][-1], float(footer['r0_tilde']),
                               delta=5e-3)


class TestReproduction(PatchR0TestCase):

    def test_reproduce_figure1(self):
        output = self._tmp_files('figure1.csv')
        status, out, err = run_main(['reproduce-figure1', '--output',
                                     output])
        self.assertEqual(status, EXIT_OK, out)
        for value in ('1.5340', '1.4478', '1.5028', '1.3555'):
            self.assertIn(value, out)
        self.assertNotIn('FAIL', out)
        self.assertIn('R0 at d = 1e-05', out)
        rows = csv_read(output)
        self.assertEqual(len(rows), 63)


if __name__ == '__main__':
    unittest.main()
