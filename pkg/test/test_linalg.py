"""
`linalg` module unit tests.

"""

import unittest

import numpy as np

import WellClass.linalg
from WellClass.errors import DataError, TrainingError

def random_spd(rng, m):
    a = rng.normal(size=(m, m))
    return np.dot(a, a.T) + 0.1*np.eye(m)

class TestJacobiEigh(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(0)

    def test_eigen_residual(self):
        for m in (1, 2, 5, 21):
            a = random_spd(self.rng, m)
            w, v = WellClass.linalg.jacobi_eigh(a)
            residual = np.linalg.norm(np.dot(a, v) - v*w)
            self.assertLess(residual, 1e-8*max(1., np.linalg.norm(a)))

    def test_orthonormal(self):
        a = random_spd(self.rng, 6)
        _, v = WellClass.linalg.jacobi_eigh(a)
        np.testing.assert_allclose(np.dot(v.T, v), np.eye(6), atol=1e-12)

    def test_sorted_descending(self):
        a = random_spd(self.rng, 8)
        w, _ = WellClass.linalg.jacobi_eigh(a)
        self.assertTrue(np.all(np.diff(w) <= 0))

    def test_matches_numpy(self):
        a = random_spd(self.rng, 7)
        w, _ = WellClass.linalg.jacobi_eigh(a)
        np.testing.assert_allclose(w, np.linalg.eigvalsh(a)[::-1],
                                   rtol=1e-10)

    def test_indefinite(self):
        a = np.array([[0., 1.], [1., 0.]])
        w, v = WellClass.linalg.jacobi_eigh(a)
        np.testing.assert_allclose(w, [1., -1.], atol=1e-14)
        np.testing.assert_allclose(np.dot(a, v), v*w, atol=1e-14)

    def test_diagonal_input(self):
        w, v = WellClass.linalg.jacobi_eigh(np.diag([1., 3., 2.]))
        np.testing.assert_array_equal(w, [3., 2., 1.])
        np.testing.assert_array_equal(np.abs(v), np.eye(3)[:, [1, 2, 0]])

    def test_zero_matrix(self):
        w, v = WellClass.linalg.jacobi_eigh(np.zeros((3, 3)))
        np.testing.assert_array_equal(w, np.zeros(3))
        np.testing.assert_array_equal(v, np.eye(3))

    def test_not_symmetric(self):
        self.assertRaises(DataError, WellClass.linalg.jacobi_eigh,
                          np.array([[1., 2.], [0., 1.]]))

    def test_not_square(self):
        self.assertRaises(DataError, WellClass.linalg.jacobi_eigh,
                          np.ones((2, 3)))

    def test_not_converged(self):
        with self.assertRaises(TrainingError) as cm:
            WellClass.linalg.jacobi_eigh(np.array([[2., 1.], [1., 2.]]),
                                         max_sweeps=0)
        self.assertIn('0 sweeps', str(cm.exception))

class TestSymSqrt(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(1)

    def test_square_reconstructs(self):
        a = random_spd(self.rng, 6)
        r = WellClass.linalg.sym_sqrt(a)
        np.testing.assert_allclose(np.dot(r, r), a, atol=1e-8)

    def test_symmetric_psd(self):
        r = WellClass.linalg.sym_sqrt(random_spd(self.rng, 6))
        np.testing.assert_array_equal(r, r.T)
        self.assertGreaterEqual(np.linalg.eigvalsh(r).min(), -1e-12)

    def test_diagonal(self):
        r = WellClass.linalg.sym_sqrt(np.diag([4., 9., 0.]))
        np.testing.assert_allclose(r, np.diag([2., 3., 0.]), atol=1e-15)

    def test_rank_deficient(self):
        x = self.rng.normal(size=(6, 2))
        a = np.dot(x, x.T)
        r = WellClass.linalg.sym_sqrt(a)
        np.testing.assert_allclose(np.dot(r, r), a, atol=1e-7)

    def test_negative_definite(self):
        self.assertRaises(DataError, WellClass.linalg.sym_sqrt,
                          np.diag([1., -1.]))

if __name__ == '__main__':
    unittest.main()
