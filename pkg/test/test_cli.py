"""
`cli` module unit tests.

"""

import os
import shutil
import tempfile
import unittest

import numpy as np
import pandas as pd

import WellClass.cli
import WellClass.dataset
import WellClass.io
import WellClass.pca
import WellClass.svm
import WellClass.transform
from WellClass.errors import ConfigError

# Small generated sets: 3 series per class, 4 one-minute segments each
SMALL = dict(n_per_class=3, series_len=1201)

class TestPipelineConfig(unittest.TestCase):
    def test_defaults_valid(self):
        cfg = WellClass.cli.PipelineConfig()
        self.assertIs(WellClass.cli.validate_pipeline_config(cfg), cfg)

    def test_pcs_bounds(self):
        WellClass.cli.validate_pipeline_config(
            WellClass.cli.PipelineConfig(transform='cov', pcs=21))
        with self.assertRaises(ConfigError) as cm:
            WellClass.cli.validate_pipeline_config(
                WellClass.cli.PipelineConfig(transform='cov', pcs=22))
        self.assertIn('21', str(cm.exception))
        self.assertRaises(ConfigError,
                          WellClass.cli.validate_pipeline_config,
                          WellClass.cli.PipelineConfig(transform='std',
                                                       pcs=7))

    def test_pcs_direction_channels(self):
        self.assertRaises(ConfigError,
                          WellClass.cli.validate_pipeline_config,
                          WellClass.cli.PipelineConfig(transform='cov',
                                                       channels='x',
                                                       pcs=7))

    def test_invalid_fields(self):
        for fields in [{'transform': 'fft'},
                       {'method': 'knn'},
                       {'noise': 5},
                       {'test_fraction': 1.},
                       {'logreg': {'alpha': 1.}},
                       {'dtree': {'prune': 'later'}},
                       {'svm': {'C': -1.}},
                       {'cnn': {'activation': 'elu'}}]:
            self.assertRaises(ConfigError,
                              WellClass.cli.validate_pipeline_config,
                              WellClass.cli.PipelineConfig(**fields))

    def test_unknown_field(self):
        with self.assertRaises(ConfigError) as cm:
            WellClass.cli.config_from_dict({'transform': 'std',
                                            'window': 60})
        self.assertIn('window', str(cm.exception))

    def test_config_hash(self):
        a = WellClass.cli.PipelineConfig(seed=1)
        self.assertEqual(WellClass.cli.config_hash(a),
                         WellClass.cli.config_hash(a._replace(out_dir='x')))
        self.assertNotEqual(WellClass.cli.config_hash(a),
                            WellClass.cli.config_hash(a._replace(seed=2)))
        self.assertEqual(len(WellClass.cli.config_hash(a)), 64)

    def test_config_file(self):
        tmpdir = tempfile.mkdtemp()
        try:
            cfg = WellClass.cli.PipelineConfig(channels=('accx_FJ', 'bmx'),
                                               svm={'C': 2.})
            path = os.path.join(tmpdir, 'config.json')
            WellClass.cli.write_config(cfg, path)
            self.assertEqual(WellClass.cli.read_config(path), cfg)
        finally:
            shutil.rmtree(tmpdir)

    def test_config_from_args(self):
        args = WellClass.cli.build_parser().parse_args(
            ['train', 'svm', '--C', '2', '--pcs', 'none', '--seed', '3'])
        cfg = WellClass.cli.config_from_args(args, args.method)
        self.assertEqual(cfg.method, 'svm')
        self.assertIsNone(cfg.pcs)
        self.assertEqual(cfg.seed, 3)
        self.assertEqual(cfg.svm, {'C': 2.})
        self.assertIsNone(cfg.logreg)

class TestRunPipeline(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_logreg_with_pca(self):
        out_dir = os.path.join(self.tmpdir, 'run')
        cfg = WellClass.cli.PipelineConfig(transform='std', pcs=2,
                                           out_dir=out_dir, xlsx=True,
                                           **SMALL)
        output = WellClass.cli.run_pipeline(cfg)
        self.assertEqual(list(output.table['method']), ['logreg'])
        self.assertTrue(0. <= output.table['accuracy'][0] <= 1.)
        for filename in ['config.json', 'features_train.csv',
                         'features_test.csv', 'standardize.json', 'pca.json',
                         'logreg.json', 'report.csv', 'report.txt',
                         'report.xlsx', 'about.json']:
            self.assertTrue(os.path.exists(os.path.join(out_dir, filename)),
                            filename)
        self.assertEqual(WellClass.pca.load(
            os.path.join(out_dir, 'pca.json')).d, 2)
        about = WellClass.io.read_json(os.path.join(out_dir, 'about.json'))
        self.assertEqual(about['config_hash'], output.config_hash)
        # 24 segments, 5 of them in the test set
        features = WellClass.transform.read_features(
            os.path.join(out_dir, 'features_test.csv'))
        self.assertEqual(features.values.shape, (5, 6))

    def test_deterministic(self):
        tables = []
        for name in ['a', 'b']:
            cfg = WellClass.cli.PipelineConfig(
                transform='std', pcs=None, method='dtree',
                out_dir=os.path.join(self.tmpdir, name), **SMALL)
            tables.append(WellClass.cli.run_pipeline(cfg).table)
        self.assertEqual(tables[0]['accuracy'][0], tables[1]['accuracy'][0])
        self.assertEqual(tables[0]['config'][0], tables[1]['config'][0])

    def test_compare_evaluate_and_emit(self):
        data_dir = os.path.join(self.tmpdir, 'data')
        WellClass.dataset.write_series_set(
            WellClass.dataset.generate(
                WellClass.dataset.make_generator_config(
                    n_series_per_class=3, series_len=1201, seed=4)),
            data_dir)
        run_dir = os.path.join(self.tmpdir, 'run')
        cfg = WellClass.cli.PipelineConfig(transform='std', pcs=None,
                                           method='all', data_dir=data_dir,
                                           out_dir=run_dir,
                                           cnn={'epochs': 2})
        output = WellClass.cli.run_pipeline(cfg)
        self.assertEqual(list(output.table['method']),
                         list(WellClass.cli.METHODS))
        for filename in ['logreg.json', 'dtree.json', 'svm.json', 'cnn.bin',
                         'cnn.json', 'cnn_history.csv', 'embedding_test.csv']:
            self.assertTrue(os.path.exists(os.path.join(run_dir, filename)),
                            filename)
        history = pd.read_csv(os.path.join(run_dir, 'cnn_history.csv'))
        self.assertEqual(len(history), 2)

        # Reapplied to its own data, every model sees all 24 segments
        eval_dir = os.path.join(self.tmpdir, 'eval')
        table = WellClass.cli.evaluate_run(run_dir, data_dir, eval_dir)
        self.assertEqual(list(table['method']), list(WellClass.cli.METHODS))
        self.assertTrue(os.path.exists(os.path.join(eval_dir,
                                                    'evaluation.csv')))

        plot_dir = os.path.join(self.tmpdir, 'plots')
        paths = WellClass.cli.emit_plots(run_dir, plot_dir)
        names = [os.path.basename(p) for p in paths]
        self.assertEqual(len([n for n in names if n.startswith('pair_')]), 15)
        self.assertEqual(
            len([n for n in names if n.startswith('marginal_')]), 6)
        self.assertIn('embedding.csv', names)

    def test_baseline(self):
        out_dir = os.path.join(self.tmpdir, 'baseline')
        cfg = WellClass.cli.PipelineConfig(method='baseline', n_per_class=2,
                                           series_len=3601, out_dir=out_dir)
        output = WellClass.cli.run_pipeline(cfg)
        self.assertEqual(list(output.table['label']), [0, 1])
        # 12-minute series, 10-minute windows, 1-minute steps
        np.testing.assert_array_equal(output.table['n_lines'], [6, 6])
        clouds = pd.read_csv(os.path.join(out_dir, 'lines.csv'))
        self.assertEqual(len(clouds), 12)

    def test_sweep_noise_with_data_dir(self):
        cfg = WellClass.cli.PipelineConfig(data_dir=self.tmpdir,
                                           out_dir=self.tmpdir)
        self.assertRaises(ConfigError, WellClass.cli.sweep, cfg, [2],
                          [1, 10])

class TestEndToEnd(unittest.TestCase):
    """
    Full-size runs: 20 series per class of one hour each.

    """
    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def run_methods(self, name, **fields):
        cfg = WellClass.cli.PipelineConfig(
            out_dir=os.path.join(self.tmpdir, name), **fields)
        output = WellClass.cli.run_pipeline(cfg)
        return dict(zip(output.table['method'], output.table['accuracy']))

    def run_logreg(self, noise, name):
        accuracy = self.run_methods(name, transform='cov', pcs=4,
                                    noise=noise)
        return accuracy['logreg']

    def test_logreg_noise_levels(self):
        clean = self.run_logreg(1, 'noise1')
        noisy = self.run_logreg(50, 'noise50')
        self.assertGreaterEqual(clean, 0.95)
        self.assertLessEqual(noisy, clean)

    def test_noise_levels_per_method(self):
        for method in ['svm', 'dtree']:
            clean = self.run_methods(method + '1', method=method,
                                     noise=1)[method]
            noisy = self.run_methods(method + '50', method=method,
                                     noise=50)[method]
            self.assertGreaterEqual(clean, 0.9, method)
            # Unpruned trees differ by a few test segments across noise levels
            slack = 0.02 if method == 'dtree' else 0.
            self.assertLessEqual(noisy, clean + slack, method)

    def test_cov_variance_concentrated(self):
        self.run_methods('default')
        model = WellClass.pca.load(os.path.join(self.tmpdir, 'default',
                                                'pca.json'))
        self.assertEqual(len(model.eigenvalues), 21)
        cumulative = WellClass.pca.cumulative_explained_variance_ratio(model)
        self.assertGreater(cumulative[6], 0.9)

    def test_logreg_more_components(self):
        two = self.run_methods('pcs2', transform='cov', pcs=2)['logreg']
        four = self.run_methods('pcs4', transform='cov', pcs=4)['logreg']
        self.assertGreaterEqual(four, 0.95)
        self.assertGreaterEqual(four, two)

    def test_support_vectors_sparse(self):
        # 1920 training segments
        for kind in ['cov', 'std']:
            self.run_methods(kind, transform=kind, pcs=3, method='svm')
            model = WellClass.svm.load(os.path.join(self.tmpdir, kind,
                                                    'svm.json'))
            n_sv, n_bound = WellClass.svm.n_support(model)
            self.assertGreater(n_sv, 0, kind)
            self.assertLess(n_sv, 100, kind)
            self.assertLessEqual(n_bound, n_sv, kind)

    def test_cnn_against_classical(self):
        accuracy = self.run_methods('all', method='all', noise=1,
                                    cnn={'epochs': 30})
        classical = max(accuracy[m] for m in ['logreg', 'dtree', 'svm'])
        # Within two of the 480 test segments
        self.assertGreaterEqual(accuracy['cnn'], classical - 0.005)

    def test_rerun_identical(self):
        reports = []
        for name in ['a', 'b']:
            self.run_logreg(1, name)
            table = pd.read_csv(os.path.join(self.tmpdir, name,
                                             'report.csv'))
            reports.append(table.drop(columns=['train_ms', 'test_ms']))
        pd.testing.assert_frame_equal(reports[0], reports[1])

class TestEmit(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_feature_pairs(self):
        rng = np.random.default_rng(0)
        features = WellClass.transform.FeatureMatrix(
            values=rng.normal(size=(10, 6)),
            feature_names=WellClass.io.DEFAULT_CHANNELS,
            labels=np.repeat([0, 1], 5))
        paths = WellClass.cli.emit_feature_pairs(features, self.tmpdir)
        self.assertEqual(len(paths), 21)
        table = pd.read_csv(os.path.join(self.tmpdir, 'pair_01_02.csv'))
        self.assertEqual(list(table.columns),
                         [WellClass.io.DEFAULT_CHANNELS[0],
                          WellClass.io.DEFAULT_CHANNELS[1], 'label'])
        np.testing.assert_allclose(table.iloc[:, 0], features.values[:, 0])

    def test_pca(self):
        rng = np.random.default_rng(1)
        model = WellClass.pca.fit(rng.normal(size=(50, 4)), 3)
        table = pd.read_csv(WellClass.cli.emit_pca(model, self.tmpdir))
        self.assertEqual(list(table['component']), [1, 2, 3])
        self.assertLessEqual(table['cumulative'].iloc[-1], 1. + 1e-12)
        self.assertTrue(np.all(np.diff(table['ratio']) <= 1e-12))

class TestMain(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_generate(self):
        out_dir = os.path.join(self.tmpdir, 'data')
        code = WellClass.cli.main(['generate', '--n-per-class', '1',
                                   '--len', '301', '--out', out_dir])
        self.assertEqual(code, 0)
        series_set = WellClass.dataset.read_series_set(out_dir)
        self.assertEqual([label for _, label in series_set.items], [0, 1])

    def test_config_error(self):
        code = WellClass.cli.main(['train', 'logreg', '--transform', 'cov',
                                   '--pcs', '22', '-o', self.tmpdir])
        self.assertEqual(code, 2)

    def test_data_error(self):
        code = WellClass.cli.main(['emit-plots', '--run', self.tmpdir,
                                   '-o', os.path.join(self.tmpdir, 'plots')])
        self.assertEqual(code, 3)

    def test_library_error_exit_code(self):
        # Constant features have no explained variance
        path = os.path.join(self.tmpdir, 'features.csv')
        WellClass.transform.write_features(
            WellClass.transform.FeatureMatrix(
                values=np.ones((4, 3)),
                feature_names=('a', 'b', 'c'),
                labels=np.array([0, 0, 1, 1])),
            path)
        code = WellClass.cli.main(['pca', '-i', path, '--pcs', '2',
                                   '-o', os.path.join(self.tmpdir, 'pca')])
        self.assertEqual(code, 3)

if __name__ == '__main__':
    unittest.main()
