"""
`transform` module unit tests.

"""

import os
import shutil
import tempfile
import unittest

import numpy as np

import WellClass.dataset
import WellClass.io
import WellClass.transform
from WellClass.errors import ConfigError, DataError

class TestStdTransform(unittest.TestCase):
    def test_hand_computed(self):
        x = np.array([[1., 7.], [2., 7.], [3., 7.], [4., 7.], [5., 7.]])
        np.testing.assert_allclose(WellClass.transform.std_transform(x),
                                   [1.5811388, 0.], atol=1e-7)

    def test_channel_names(self):
        rng = np.random.default_rng(0)
        s = WellClass.io.SeriesData(rng.normal(size=(300, 6)))
        np.testing.assert_allclose(
            WellClass.transform.std_transform(s, ['bmx', 'bmy']),
            np.std(np.asarray(s)[:, 4:6], axis=0, ddof=1))

    def test_single_sample(self):
        self.assertRaises(DataError, WellClass.transform.std_transform,
                          np.ones((1, 3)))

class TestCovMatrix(unittest.TestCase):
    def test_hand_computed(self):
        x = np.array([[1., 2.], [2., 4.], [3., 6.]])
        np.testing.assert_allclose(WellClass.transform.cov_matrix(x),
                                   [[1., 2.], [2., 4.]])

    def test_identical_channels(self):
        c = np.arange(10, dtype=float)**2
        sigma = WellClass.transform.cov_matrix(np.column_stack([c, c]))
        self.assertAlmostEqual(sigma[0, 1], sigma[0, 0])
        self.assertAlmostEqual(sigma[1, 1], sigma[0, 0])

    def test_negated_channel(self):
        c = np.arange(10, dtype=float)**2
        sigma = WellClass.transform.cov_matrix(np.column_stack([c, -c]))
        self.assertAlmostEqual(sigma[0, 1], -sigma[0, 0])

    def test_diagonal_is_squared_std(self):
        x = np.random.default_rng(1).normal(size=(300, 6))
        np.testing.assert_allclose(
            np.diag(WellClass.transform.cov_matrix(x)),
            WellClass.transform.std_transform(x)**2)

class TestCovSqrt(unittest.TestCase):
    def test_identity(self):
        np.testing.assert_allclose(WellClass.transform.cov_sqrt(np.eye(3)),
                                   np.eye(3), atol=1e-12)

    def test_diagonal(self):
        np.testing.assert_allclose(
            WellClass.transform.cov_sqrt(np.diag([4., 9.])),
            np.diag([2., 3.]), atol=1e-12)

    def test_reconstructs(self):
        sigma = np.array([[2., 1.], [1., 2.]])
        r = WellClass.transform.cov_sqrt(sigma)
        np.testing.assert_allclose(np.dot(r, r), sigma, atol=1e-10)
        np.testing.assert_allclose(r, r.T)

    def test_negative_eigenvalue(self):
        self.assertRaises(DataError, WellClass.transform.cov_sqrt,
                          np.array([[1., 2.], [2., 1.]]))

class TestCorrelation(unittest.TestCase):
    def test_hand_computed(self):
        corr = WellClass.transform.correlation(np.array([[4., 2.], [2., 4.]]))
        np.testing.assert_allclose(corr, [[1., 0.5], [0.5, 1.]])

    def test_unit_diagonal(self):
        x = np.random.default_rng(2).normal(size=(50, 4))
        corr = WellClass.transform.correlation(np.cov(x, rowvar=False))
        np.testing.assert_array_equal(np.diag(corr), np.ones(4))
        np.testing.assert_allclose(corr, np.corrcoef(x, rowvar=False),
                                   atol=1e-12)

    def test_zero_variance(self):
        self.assertRaises(DataError, WellClass.transform.correlation,
                          np.array([[0., 0.], [0., 1.]]))

class TestCovTransform(unittest.TestCase):
    def setUp(self):
        self.x = np.random.default_rng(3).normal(size=(300, 6))

    def test_length(self):
        self.assertEqual(WellClass.transform.cov_transform(self.x).shape,
                         (21,))
        self.assertEqual(
            WellClass.transform.cov_transform(self.x, [0, 1, 2]).shape, (6,))

    def test_order(self):
        r = WellClass.transform.cov_sqrt(
            WellClass.transform.cov_matrix(self.x[:, :3]))
        np.testing.assert_allclose(
            WellClass.transform.cov_transform(self.x, [0, 1, 2]),
            [r[0, 0], r[0, 1], r[0, 2], r[1, 1], r[1, 2], r[2, 2]])

    def test_uncorrelated_channels(self):
        # Exactly orthogonal zero-mean columns give a diagonal covariance
        t = np.arange(400)
        x = np.column_stack([np.sin(2*np.pi*t/100.),
                             3.*np.cos(2*np.pi*t/100.)])
        f = WellClass.transform.cov_transform(x)
        np.testing.assert_allclose(
            f[[0, 2]], WellClass.transform.std_transform(x), rtol=1e-10)
        self.assertLess(abs(f[1]), 1e-10)

class TestTransform(unittest.TestCase):
    def setUp(self):
        rng = np.random.default_rng(4)
        items = tuple((WellClass.io.SeriesData(rng.normal(size=(900, 6))),
                       label) for label in (0, 1))
        self.series_set = WellClass.dataset.LabeledSeriesSet(
            items=items, noise_level=1, seed=0)
        self.segments = WellClass.dataset.window(self.series_set)

    def test_std(self):
        features = WellClass.transform.transform(self.segments, 'std')
        self.assertEqual(features.values.shape, (6, 6))
        self.assertEqual(features.feature_names,
                         WellClass.io.DEFAULT_CHANNELS)
        np.testing.assert_array_equal(features.labels, [0, 0, 0, 1, 1, 1])

    def test_cov(self):
        features = WellClass.transform.transform(self.segments, 'cov')
        self.assertEqual(features.values.shape, (6, 21))
        self.assertEqual(features.feature_names[1],
                         'sqrtcov(accx_FJ,accy_FJ)')

    def test_cov_diagonal_matches_std(self):
        std = WellClass.transform.transform(self.segments, 'std')
        cov = WellClass.transform.transform(self.segments, 'cov')
        rows, cols = np.triu_indices(6)
        diagonal = np.flatnonzero(rows == cols)
        # Square root of the diagonal of the covariance equals the std
        for k, s in enumerate(self.segments):
            sigma = WellClass.transform.cov_matrix(s.samples)
            np.testing.assert_allclose(np.sqrt(np.diag(sigma)),
                                       std.values[k], rtol=1e-10)
        self.assertEqual(len(diagonal), 6)
        self.assertTrue(np.all(cov.values[:, diagonal] > 0))

    def test_direction_channels(self):
        features = WellClass.transform.transform(self.segments, 'cov', 'y')
        self.assertEqual(features.values.shape, (6, 6))
        self.assertEqual(features.feature_names[0], 'sqrtcov(accy_FJ,accy_FJ)')

    def test_unknown_kind(self):
        self.assertRaises(ConfigError, WellClass.transform.transform,
                          self.segments, 'fft')

    def test_empty(self):
        self.assertRaises(DataError, WellClass.transform.transform, [])

class TestFeatureFiles(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_write_read(self):
        features = WellClass.transform.FeatureMatrix(
            values=np.random.default_rng(5).normal(size=(4, 3)),
            feature_names=('a', 'b', 'c'),
            labels=np.array([0, 1, 1, 0]))
        path = os.path.join(self.tmpdir, 'features.csv')
        WellClass.transform.write_features(features, path)
        read = WellClass.transform.read_features(path)
        self.assertEqual(read.feature_names, ('a', 'b', 'c'))
        np.testing.assert_array_equal(read.labels, features.labels)
        np.testing.assert_allclose(read.values, features.values, rtol=1e-12)

    def test_missing(self):
        self.assertRaises(DataError, WellClass.transform.read_features,
                          os.path.join(self.tmpdir, 'missing.csv'))

if __name__ == '__main__':
    unittest.main()
