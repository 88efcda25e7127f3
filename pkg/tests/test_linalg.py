import unittest

import numpy as np

from patchr0.errors import PreconditionError, ConvergenceError
from patchr0.linalg import (as_square_matrix, is_cooperative, is_nonnegative,
                            eigenvalues, spectral_bound, spectral_radius,
                            block_structure, is_irreducible, power_iteration,
                            perron_pair)

from utils import PatchR0TestCase, random_connectivity


class TestLinalg(PatchR0TestCase):

    def test_as_square_matrix(self):
        self.assertEqual(as_square_matrix(2.5).shape, (1, 1))
        self.assertRaises(PreconditionError, as_square_matrix,
                          np.zeros((2, 3)))
        self.assertRaises(PreconditionError, as_square_matrix,
                          [[1.0, np.nan], [0.0, 1.0]])

    def test_sign_patterns(self):
        self.assertTrue(is_cooperative([[-5.0, 0.0], [1.0, -1.0]]))
        self.assertFalse(is_cooperative([[5.0, -1e-300], [1.0, 1.0]]))
        self.assertTrue(is_nonnegative([[0.0, 1.0], [2.0, 0.0]]))
        self.assertFalse(is_nonnegative([[-1.0, 1.0], [2.0, 0.0]]))

    def test_eigenvalue_order(self):
        values = eigenvalues(np.diag([1.0, 3.0, 2.0]))
        self.assertAllClose(values.real, [3.0, 2.0, 1.0])
        rotation = eigenvalues([[0.0, -1.0], [1.0, 0.0]])
        self.assertAllClose(rotation.imag, [1.0, -1.0])

    def test_bound_and_radius(self):
        A = np.array([[-3.0, 0.0], [0.0, 1.0]])
        self.assertAlmostEqual(spectral_bound(A), 1.0)
        self.assertAlmostEqual(spectral_radius(A), 3.0)

    def test_shift_moves_bound(self):
        rng = np.random.RandomState(21)
        for trial in range(10):
            A = rng.uniform(0.0, 1.0, size=(4, 4))
            np.fill_diagonal(A, rng.uniform(-3.0, 1.0, size=4))
            c = rng.uniform(-5.0, 5.0)
            self.assertAlmostEqual(spectral_bound(A + c * np.eye(4)),
                                   spectral_bound(A) + c, places=10)

    def test_radius_between_column_sums(self):
        rng = np.random.RandomState(22)
        for trial in range(20):
            A = rng.uniform(0.0, 1.0, size=(5, 5)) * (
                rng.uniform(size=(5, 5)) < 0.6)
            sums = A.sum(axis=0)
            r = spectral_radius(A)
            self.assertGreaterEqual(r, sums.min() - 1e-12)
            self.assertLessEqual(r, sums.max() + 1e-12)
        self.assertAlmostEqual(spectral_radius([[0.0, 2.0], [0.5, 0.0]]),
                               1.0)

    def test_perron_value_is_bound(self):
        rng = np.random.RandomState(23)
        for trial in range(10):
            n = rng.randint(2, 6)
            A = rng.uniform(0.1, 1.0, size=(n, n))
            np.fill_diagonal(A, rng.uniform(-2.0, 0.5, size=n))
            pair = perron_pair(A)
            self.assertAlmostEqual(pair.value, spectral_bound(A), places=8)
            self.assertAllClose(A.dot(pair.right), pair.value * pair.right,
                                atol=1e-8)
            self.assertTrue(np.all(pair.right > 0.0))

    def test_block_structure_chain(self):
        # 0 -> 1 -> 2, patch 2 keeps everything it receives
        L = np.array([[-1.0, 0.0, 0.0],
                      [1.0, -1.0, 0.0],
                      [0.0, 1.0, 0.0]])
        structure = block_structure(L)
        self.assertEqual(structure.n_blocks, 3)
        self.assertEqual(structure.permutation, (0, 1, 2))
        self.assertFalse(is_irreducible(L))

    def test_block_structure_is_lower_triangular(self):
        rng = np.random.RandomState(7)
        for trial in range(20):
            L = random_connectivity(rng, 7, reducible=True)
            structure = block_structure(L)
            permuted = structure.permute(L)
            offsets = np.cumsum((0,) + structure.block_sizes)
            for b in range(structure.n_blocks):
                rows = slice(offsets[b], offsets[b + 1])
                cols = slice(offsets[b + 1], offsets[-1])
                self.assertFalse(np.any(permuted[rows, cols]))
            self.assertEqual(sorted(structure.permutation), list(range(7)))

    def test_irreducible_cycle(self):
        L = np.array([[-1.0, 0.0, 1.0],
                      [1.0, -1.0, 0.0],
                      [0.0, 1.0, -1.0]])
        self.assertTrue(is_irreducible(L))
        self.assertEqual(block_structure(L).permutation, (0, 1, 2))

    def test_perron_pair(self):
        pair = perron_pair([[-1.0, 2.0], [1.0, -2.0]])
        self.assertAlmostEqual(pair.value, 0.0, places=12)
        self.assertAllClose(pair.right, [2.0 / 3.0, 1.0 / 3.0])
        self.assertAllClose(pair.left, [1.0, 1.0])
        self.assertAlmostEqual(pair.left.dot(pair.right), 1.0)

    def test_perron_pair_preconditions(self):
        self.assertRaises(PreconditionError, perron_pair,
                          [[-1.0, 0.0], [1.0, 0.0]])
        self.assertRaises(PreconditionError, perron_pair,
                          [[-1.0, -1.0], [1.0, 0.0]])

    def test_power_iteration_cap(self):
        B = np.array([[2.0, 1.0], [1.0, 3.0]])
        self.assertRaises(ConvergenceError, power_iteration, B, 1e-13, 1)
        x = power_iteration(B)
        self.assertAlmostEqual(x.sum(), 1.0)
        self.assertAllClose(B.dot(x), spectral_radius(B) * x, atol=1e-10)


if __name__ == '__main__':
    unittest.main()
