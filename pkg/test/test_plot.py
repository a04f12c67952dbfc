"""
`plot` module unit tests.

"""

import os
import shutil
import tempfile
import unittest

import numpy as np
import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt

import WellClass.plot

class TestPlot(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()
        rng = np.random.default_rng(0)
        self.values = rng.normal(size=(20, 3))
        self.labels = np.repeat([0, 1], 10)

    def tearDown(self):
        plt.close('all')
        shutil.rmtree(self.tmpdir)

    def test_scatter2d_saves(self):
        path = os.path.join(self.tmpdir, 'scatter.png')
        WellClass.plot.scatter2d(self.values[:, :2], self.labels,
                                 xlabel='Intercept', ylabel='Incline',
                                 savefig=path)
        self.assertTrue(os.path.exists(path))

    def test_scatter2d_columns(self):
        self.assertRaises(ValueError, WellClass.plot.scatter2d, self.values,
                          self.labels)

    def test_hist1d_keeps_axis(self):
        WellClass.plot.hist1d(self.values[:, 0], self.labels, bins=5)
        self.assertEqual(len(plt.gca().patches), 10)

    def test_feature_pairs(self):
        path = os.path.join(self.tmpdir, 'pairs.png')
        WellClass.plot.feature_pairs(self.values, self.labels,
                                     feature_names=['a', 'b', 'c'],
                                     savefig=path)
        self.assertTrue(os.path.exists(path))

    def test_curves(self):
        path = os.path.join(self.tmpdir, 'pca.png')
        WellClass.plot.explained_variance([0.5, 0.3, 0.2], savefig=path)
        self.assertTrue(os.path.exists(path))
        path = os.path.join(self.tmpdir, 'history.png')
        WellClass.plot.training_curve([0.3, 0.2, 0.1], [0.35, 0.25, 0.2],
                                      savefig=path)
        self.assertTrue(os.path.exists(path))

if __name__ == '__main__':
    unittest.main()
