"""
`evaluate` module unit tests.

"""

import json
import os
import shutil
import tempfile
import unittest

import numpy as np
import pandas as pd
import sklearn.metrics

import WellClass.evaluate
import WellClass.logreg
import WellClass.transform
from WellClass.errors import ConfigError, DataError

def separable_features(n=40, seed=0):
    rng = np.random.default_rng(seed)
    labels = np.repeat([0, 1], n // 2)
    values = rng.normal(size=(n, 2)) + 8.*labels[:, np.newaxis]
    return WellClass.transform.FeatureMatrix(values=values,
                                             feature_names=('a', 'b'),
                                             labels=labels)

class TestConfusion(unittest.TestCase):
    def test_all_positive(self):
        cm = WellClass.evaluate.confusion([1]*5, [1]*5)
        self.assertEqual(cm, WellClass.evaluate.ConfusionMatrix(5, 0, 0, 0))

    def test_complement(self):
        cm = WellClass.evaluate.confusion([1, 0, 1, 0], [0, 1, 0, 1])
        self.assertEqual(cm.tp, 0)
        self.assertEqual(cm.tn, 0)

    def test_enumeration(self):
        cm = WellClass.evaluate.confusion([1, 1, 0, 0], [1, 0, 0, 1])
        self.assertEqual(cm, WellClass.evaluate.ConfusionMatrix(1, 1, 1, 1))

    def test_matches_sklearn(self):
        rng = np.random.default_rng(1)
        pred = rng.integers(0, 2, size=50)
        truth = rng.integers(0, 2, size=50)
        cm = WellClass.evaluate.confusion(pred, truth)
        tn, fp, fn, tp = sklearn.metrics.confusion_matrix(truth, pred).ravel()
        self.assertEqual(cm, (tp, fp, fn, tn))

    def test_length_mismatch(self):
        self.assertRaises(ValueError, WellClass.evaluate.confusion, [1, 0],
                          [1])

    def test_empty(self):
        self.assertRaises(ValueError, WellClass.evaluate.confusion, [], [])

class TestPrecisionRecallF1(unittest.TestCase):
    def test_hand_computed(self):
        metrics = WellClass.evaluate.precision_recall_f1(
            WellClass.evaluate.ConfusionMatrix(tp=1, fp=1, fn=1, tn=1))
        self.assertEqual(metrics.precision, 0.5)
        self.assertEqual(metrics.recall, 0.5)
        self.assertEqual(metrics.f1, 0.5)
        self.assertEqual(metrics.degenerate, ())

    def test_perfect(self):
        metrics = WellClass.evaluate.precision_recall_f1(
            WellClass.evaluate.confusion([0, 1, 1], [0, 1, 1]))
        self.assertEqual(metrics[:3], (1., 1., 1.))

    def test_degenerate(self):
        metrics = WellClass.evaluate.precision_recall_f1(
            WellClass.evaluate.ConfusionMatrix(tp=0, fp=0, fn=3, tn=2))
        self.assertEqual(metrics[:3], (0., 0., 0.))
        self.assertEqual(metrics.degenerate, ('precision', 'f1'))

    def test_matches_sklearn(self):
        rng = np.random.default_rng(2)
        pred = rng.integers(0, 2, size=50)
        truth = rng.integers(0, 2, size=50)
        metrics = WellClass.evaluate.precision_recall_f1(
            WellClass.evaluate.confusion(pred, truth))
        self.assertAlmostEqual(metrics.precision,
                               sklearn.metrics.precision_score(truth, pred))
        self.assertAlmostEqual(metrics.recall,
                               sklearn.metrics.recall_score(truth, pred))
        self.assertAlmostEqual(metrics.f1,
                               sklearn.metrics.f1_score(truth, pred))

class TestAccuracy(unittest.TestCase):
    def test_all_correct(self):
        self.assertEqual(WellClass.evaluate.accuracy([0, 1], [0, 1]), 1.)

    def test_half_correct(self):
        self.assertEqual(
            WellClass.evaluate.accuracy([0, 1, 1, 0], [0, 1, 0, 1]), 0.5)

    def test_full_scale(self):
        truth = np.zeros(1236, dtype=int)
        pred = truth.copy()
        pred[:4] = 1
        self.assertAlmostEqual(WellClass.evaluate.accuracy(pred, truth),
                               0.99676, places=5)

    def test_feature_matrix_truth(self):
        features = separable_features()
        self.assertEqual(
            WellClass.evaluate.accuracy(features.labels, features), 1.)

class TestCrossValAccuracy(unittest.TestCase):
    def setUp(self):
        self.features = separable_features()

    def test_separable(self):
        output = WellClass.evaluate.cross_val_accuracy(
            WellClass.logreg.fit, WellClass.logreg.predict,
            self.features.values, self.features.labels, k_folds=5,
            full_output=True)
        self.assertEqual(output.mean_accuracy, 1.)
        self.assertEqual(output.fold_accuracy.shape, (5,))

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(40, 2))
        y = np.repeat([0, 1], 20)
        a = WellClass.evaluate.cross_val_accuracy(
            WellClass.logreg.fit, WellClass.logreg.predict, X, y, seed=4)
        b = WellClass.evaluate.cross_val_accuracy(
            WellClass.logreg.fit, WellClass.logreg.predict, X, y, seed=4)
        self.assertEqual(a, b)

    def test_too_few_samples(self):
        self.assertRaises(DataError, WellClass.evaluate.cross_val_accuracy,
                          WellClass.logreg.fit, WellClass.logreg.predict,
                          np.zeros((6, 1)), [0, 0, 0, 0, 1, 1], 3)

    def test_one_fold(self):
        self.assertRaises(ValueError, WellClass.evaluate.cross_val_accuracy,
                          WellClass.logreg.fit, WellClass.logreg.predict,
                          self.features.values, self.features.labels, 1)

class TestCompare(unittest.TestCase):
    def setUp(self):
        self.train = separable_features(seed=4)
        self.test = separable_features(seed=5)
        self.method = WellClass.evaluate.Method(
            name='logreg',
            fit_fxn=WellClass.logreg.fit,
            predict_fxn=WellClass.logreg.predict,
            config={'reg_strength': 1.})

    def test_single_method(self):
        reports, table = WellClass.evaluate.compare([self.method],
                                                    self.train, self.test)
        self.assertEqual(len(reports), 1)
        self.assertEqual(list(table.columns),
                         WellClass.evaluate.REPORT_COLUMNS)
        self.assertEqual(table['method'][0], 'logreg')
        self.assertEqual(table['accuracy'][0], 1.)
        self.assertEqual(json.loads(table['config'][0]),
                         {'reg_strength': 1.})
        self.assertGreaterEqual(table['train_ms'][0], 0.)

    def test_identical_methods(self):
        _, table = WellClass.evaluate.compare([self.method, self.method],
                                              self.train, self.test)
        metrics = ['precision', 'recall', 'f1', 'accuracy']
        np.testing.assert_array_equal(table[metrics].values[0],
                                      table[metrics].values[1])

    def test_method_data(self):
        # A method's own data replaces the shared data
        method = self.method._replace(train=self.train, test=self.test)
        reports, _ = WellClass.evaluate.compare([method])
        self.assertEqual(reports[0].confusion.tp + reports[0].confusion.fn,
                         20)

    def test_untrained(self):
        method = WellClass.evaluate.Method(name='empty', fit_fxn=None,
                                           predict_fxn=None)
        self.assertRaises(ConfigError, WellClass.evaluate.compare, [method],
                          self.train, self.test)

    def test_no_data(self):
        self.assertRaises(ConfigError, WellClass.evaluate.compare,
                          [self.method])

    def test_no_methods(self):
        self.assertRaises(ConfigError, WellClass.evaluate.compare, [],
                          self.train, self.test)

class TestWriteReport(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_csv_and_xlsx(self):
        report = WellClass.evaluate.evaluate(
            WellClass.logreg.fit(separable_features()),
            WellClass.logreg.predict,
            separable_features(seed=1),
            method='logreg')
        table = WellClass.evaluate.report_table([report])
        csv_path = os.path.join(self.tmpdir, 'report.csv')
        xlsx_path = os.path.join(self.tmpdir, 'report.xlsx')
        WellClass.evaluate.write_report(table, csv_path, xlsx_path)
        read = pd.read_csv(csv_path)
        self.assertEqual(list(read.columns), WellClass.evaluate.REPORT_COLUMNS)
        self.assertTrue(os.path.exists(xlsx_path))
        self.assertIn('logreg', WellClass.evaluate.format_table(table))

if __name__ == '__main__':
    unittest.main()
