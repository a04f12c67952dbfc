"""
`cnn` module unit tests.

"""

import os
import shutil
import tempfile
import unittest
import warnings

import numpy as np
import scipy.signal

import WellClass.cnn
import WellClass.io
from WellClass.errors import ConfigError, DataError, TrainingError

# Small architecture: 2x40 -> 3x36 -> 3x16 -> 48 -> 2 -> 1
SMALL_CONFIG = WellClass.cnn.CnnConfig(in_channels=2,
                                       input_length=40,
                                       conv_layers=((3, 5),),
                                       pool_kernel=5,
                                       pool_stride=2,
                                       fc_hidden=2)

def small_batch(n=8, seed=0):
    rng = np.random.default_rng(seed)
    labels = np.repeat([0, 1], n // 2)
    values = rng.normal(size=(n, 2, 40))
    values *= (1. + labels)[:, np.newaxis, np.newaxis]
    return WellClass.cnn.Batch(values=values, labels=labels)

class TestConv1d(unittest.TestCase):
    def test_identity_filter(self):
        x = np.arange(10, dtype=float)[np.newaxis]
        filters = np.zeros((1, 1, 4))
        filters[0, 0, 0] = 1.
        out = WellClass.cnn.conv1d_forward(x, filters, np.zeros(1))
        np.testing.assert_array_equal(out, x[:, :7])

    def test_ones_filter(self):
        out = WellClass.cnn.conv1d_forward(np.array([[1., 2., 3., 4.]]),
                                           np.ones((1, 1, 3)), np.zeros(1))
        np.testing.assert_array_equal(out, [[6., 9.]])

    def test_default_layer_shape(self):
        out = WellClass.cnn.conv1d_forward(np.zeros((6, 300)),
                                           np.zeros((12, 6, 30)),
                                           np.zeros(12))
        self.assertEqual(out.shape, (12, 271))

    def test_matches_scipy(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(3, 4, 20))
        filters = rng.normal(size=(5, 4, 6))
        bias = rng.normal(size=5)
        out = WellClass.cnn.conv1d_forward(x, filters, bias)
        self.assertEqual(out.shape, (3, 5, 15))
        for b in range(3):
            for c in range(5):
                expected = bias[c] + sum(
                    scipy.signal.correlate(x[b, ci], filters[c, ci], 'valid')
                    for ci in range(4))
                np.testing.assert_allclose(out[b, c], expected, atol=1e-12)

    def test_backward_adjoint(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(2, 3, 12))
        filters = rng.normal(size=(4, 3, 5))
        g = rng.normal(size=(2, 4, 8))
        out = WellClass.cnn.conv1d_forward(x, filters, np.zeros(4))
        d_filters, d_bias, dx = WellClass.cnn.conv1d_backward(g, x, filters)
        self.assertAlmostEqual(np.sum(out*g), np.sum(x*dx), places=10)
        self.assertAlmostEqual(np.sum(out*g), np.sum(filters*d_filters),
                               places=10)
        np.testing.assert_allclose(d_bias, np.sum(g, axis=(0, 2)))

    def test_input_too_short(self):
        with self.assertRaises(DataError) as cm:
            WellClass.cnn.conv1d_forward(np.zeros((1, 2)), np.zeros((1, 1, 3)),
                                         np.zeros(1), layer='conv1')
        self.assertIn('conv1', str(cm.exception))

    def test_channel_mismatch(self):
        self.assertRaises(DataError, WellClass.cnn.conv1d_forward,
                          np.zeros((5, 300)), np.zeros((12, 6, 30)),
                          np.zeros(12))

class TestAvgPool(unittest.TestCase):
    def test_constant(self):
        out = WellClass.cnn.avgpool_forward(3.5*np.ones((2, 40)))
        np.testing.assert_allclose(out, 3.5*np.ones((2, 6)))

    def test_shapes(self):
        self.assertEqual(
            WellClass.cnn.avgpool_forward(np.zeros((12, 271))).shape,
            (12, 52))
        self.assertEqual(
            WellClass.cnn.avgpool_forward(np.zeros((24, 23))).shape,
            (24, 2))
        self.assertEqual(WellClass.cnn.pool_length(271), 52)

    def test_window_means(self):
        x = np.arange(25, dtype=float)[np.newaxis]
        np.testing.assert_allclose(WellClass.cnn.avgpool_forward(x),
                                   [[7., 12., 17.]])

    def test_backward_adjoint(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(2, 3, 40))
        g = rng.normal(size=(2, 3, 6))
        out = WellClass.cnn.avgpool_forward(x)
        dx = WellClass.cnn.avgpool_backward(g, 40)
        self.assertAlmostEqual(np.sum(out*g), np.sum(x*dx), places=10)

    def test_input_too_short(self):
        self.assertRaises(DataError, WellClass.cnn.avgpool_forward,
                          np.zeros((2, 10)))

class TestModel(unittest.TestCase):
    def test_shape_chain(self):
        self.assertEqual(WellClass.cnn.shape_chain(WellClass.cnn.CnnConfig()),
                         [(6, 300), (12, 271), (12, 52), (24, 23), (24, 2),
                          (48,), (2,), (1,)])

    def test_param_order(self):
        model = WellClass.cnn.init_model()
        self.assertEqual(list(model.params),
                         ['conv1.weight', 'conv1.bias', 'conv2.weight',
                          'conv2.bias', 'fc1.weight', 'fc1.bias',
                          'fc2.weight', 'fc2.bias'])
        self.assertEqual(model.params['conv2.weight'].shape, (24, 12, 30))
        self.assertEqual(model.params['fc1.weight'].shape, (2, 48))
        bound = 1. / np.sqrt(6*30)
        self.assertLessEqual(np.max(np.abs(model.params['conv1.weight'])),
                             bound)

    def test_init_deterministic(self):
        a = WellClass.cnn.init_model()
        b = WellClass.cnn.init_model()
        for name in a.params:
            np.testing.assert_array_equal(a.params[name], b.params[name])

    def test_zero_parameters(self):
        model = WellClass.cnn.init_model()
        for value in model.params.values():
            value[...] = 0.
        x = np.random.default_rng(4).normal(size=(3, 6, 300))
        probs, embedding = WellClass.cnn.forward(model, x)
        np.testing.assert_array_equal(probs, 0.5*np.ones(3))
        self.assertEqual(embedding.shape, (3, 2))

    def test_probabilities(self):
        model = WellClass.cnn.init_model()
        x = np.random.default_rng(5).normal(size=(5, 6, 300))
        probs = WellClass.cnn.predict_proba(model, x)
        self.assertEqual(probs.shape, (5,))
        self.assertTrue(np.all((probs > 0) & (probs < 1)))
        np.testing.assert_array_equal(WellClass.cnn.predict(model, x),
                                      (probs >= 0.5).astype(int))

    def test_single_segment(self):
        model = WellClass.cnn.init_model()
        x = np.random.default_rng(6).normal(size=(6, 300))
        self.assertEqual(WellClass.cnn.predict_proba(model, x).shape, (1,))

    def test_wrong_length(self):
        model = WellClass.cnn.init_model()
        with self.assertRaises(DataError) as cm:
            WellClass.cnn.forward(model, np.zeros((1, 6, 320)))
        self.assertIn('fc1', str(cm.exception))
        with self.assertRaises(DataError) as cm:
            WellClass.cnn.forward(model, np.zeros((1, 6, 40)))
        self.assertIn('pool1', str(cm.exception))

    def test_invalid_config(self):
        self.assertRaises(ConfigError, WellClass.cnn.init_model,
                          WellClass.cnn.CnnConfig(activation='elu'))
        self.assertRaises(ConfigError, WellClass.cnn.init_model,
                          WellClass.cnn.CnnConfig(input_length=50))

    def test_channel_statistics(self):
        values = np.random.default_rng(7).normal(size=(4, 3, 20))
        values[:, 1] = 2.
        mean, std = WellClass.cnn.channel_statistics(values)
        self.assertEqual(mean[1], 2.)
        self.assertEqual(std[1], 1.)

class TestGradCheck(unittest.TestCase):
    def test_full_network(self):
        model = WellClass.cnn.init_model()
        rng = np.random.default_rng(8)
        x = rng.normal(size=(4, 6, 300))
        y = np.array([0, 1, 0, 1])
        self.assertLess(WellClass.cnn.grad_check(model, x, y), 1e-4)

    def test_fc_only(self):
        config = WellClass.cnn.CnnConfig(in_channels=2, input_length=5,
                                         conv_layers=(), activation='tanh')
        model = WellClass.cnn.init_model(config)
        rng = np.random.default_rng(9)
        x = rng.normal(size=(4, 2, 5))
        error = WellClass.cnn.grad_check(model, x, [0, 1, 1, 0],
                                         fraction=1.)
        self.assertLess(error, 1e-7)

    def test_kinks_excluded(self):
        config = WellClass.cnn.CnnConfig(in_channels=2, input_length=5,
                                         conv_layers=(), activation='relu')
        model = WellClass.cnn.init_model(config)
        model.params['fc1.weight'][...] = 0.
        model.params['fc1.bias'][...] = 0.
        model.params['fc2.weight'][...] = 1.
        x = np.random.default_rng(10).normal(size=(4, 2, 5))
        error = WellClass.cnn.grad_check(model, x, [0, 1, 1, 0],
                                         fraction=1.)
        self.assertLess(error, 1e-6)

class TestTrain(unittest.TestCase):
    def test_zero_learning_rate(self):
        model = WellClass.cnn.init_model(SMALL_CONFIG)
        output = WellClass.cnn.train(
            model, small_batch(),
            WellClass.cnn.TrainConfig(epochs=3, batch_size=4,
                                      learning_rate=0.))
        for name in model.params:
            np.testing.assert_array_equal(output.model.params[name],
                                          model.params[name])
        self.assertEqual(len(output.train_mse), 3)
        self.assertIsNotNone(output.model.channel_mean)

    def test_input_model_unchanged(self):
        model = WellClass.cnn.init_model(SMALL_CONFIG)
        before = model.params['fc1.weight'].copy()
        WellClass.cnn.train(model, small_batch(),
                            WellClass.cnn.TrainConfig(epochs=2,
                                                      batch_size=4))
        np.testing.assert_array_equal(model.params['fc1.weight'], before)

    def test_memorize_single_sample(self):
        model = WellClass.cnn.init_model()
        x = np.random.default_rng(11).normal(size=(1, 6, 300))
        data = WellClass.cnn.Batch(values=x, labels=np.array([1]))
        output = WellClass.cnn.train(
            model, data,
            WellClass.cnn.TrainConfig(epochs=500, batch_size=1,
                                      learning_rate=1e-2))
        self.assertLess(WellClass.cnn.mse(output.model, data), 1e-3)

    def test_deterministic(self):
        config = WellClass.cnn.TrainConfig(epochs=3, batch_size=3)
        a = WellClass.cnn.train(WellClass.cnn.init_model(SMALL_CONFIG),
                                small_batch(), config)
        b = WellClass.cnn.train(WellClass.cnn.init_model(SMALL_CONFIG),
                                small_batch(), config)
        self.assertEqual(a.train_mse, b.train_mse)
        for name in a.model.params:
            np.testing.assert_array_equal(a.model.params[name],
                                          b.model.params[name])

    def test_test_mse_history(self):
        output = WellClass.cnn.train(
            WellClass.cnn.init_model(SMALL_CONFIG), small_batch(),
            WellClass.cnn.TrainConfig(epochs=4, batch_size=4),
            test_data=small_batch(seed=1))
        self.assertEqual(len(output.test_mse), 4)
        self.assertTrue(all(0 <= v <= 1 for v in output.test_mse))

    def test_non_finite_loss(self):
        data = small_batch()
        values = data.values.copy()
        values[0, 0, 0] = np.nan
        with self.assertRaises(TrainingError) as cm:
            WellClass.cnn.train(WellClass.cnn.init_model(SMALL_CONFIG),
                                WellClass.cnn.Batch(values, data.labels),
                                WellClass.cnn.TrainConfig(epochs=1,
                                                          batch_size=8))
        self.assertIn('epoch 0, batch 0', str(cm.exception))

    def test_label_count_mismatch(self):
        data = small_batch()
        self.assertRaises(DataError, WellClass.cnn.train,
                          WellClass.cnn.init_model(SMALL_CONFIG),
                          WellClass.cnn.Batch(data.values, data.labels[:3]))

class TestRandomSearch(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_log_uniform_learning_rate(self):
        space = WellClass.cnn.SearchSpace()
        lr = np.array([WellClass.cnn.sample_trial(space, 0, t)['learning_rate']
                       for t in range(10000)])
        np.testing.assert_allclose(np.percentile(np.log10(lr), [25, 50, 75]),
                                   [-3.25, -2.5, -1.75], atol=0.1)

    def test_sample_in_space(self):
        space = WellClass.cnn.SearchSpace()
        for t in range(50):
            params = WellClass.cnn.sample_trial(space, 3, t)
            self.assertIn(params['activation'], space.activations)
            self.assertIn(params['batch_size'], space.batch_sizes)
            self.assertTrue(1e-7 <= params['weight_decay'] <= 5e-4)

    def test_single_trial(self):
        space = WellClass.cnn.SearchSpace(n_trials=1)
        log_path = os.path.join(self.tmpdir, 'trials.jsonl')
        output = WellClass.cnn.random_search(space, small_batch(),
                                             small_batch(seed=1),
                                             cnn_config=SMALL_CONFIG,
                                             epochs=2, log_path=log_path)
        trial = WellClass.cnn.sample_trial(space, 0, 0)
        self.assertEqual(output.best_activation, trial['activation'])
        self.assertEqual(output.best_config.batch_size, trial['batch_size'])
        self.assertEqual(output.best_model.config.activation,
                         trial['activation'])
        self.assertEqual(len(WellClass.io.read_jsonl(log_path)), 1)

    def test_best_trial(self):
        space = WellClass.cnn.SearchSpace(n_trials=3)
        output = WellClass.cnn.random_search(space, small_batch(),
                                             small_batch(seed=1),
                                             cnn_config=SMALL_CONFIG,
                                             epochs=2)
        test_mse = [t['test_mse'] for t in output.trials]
        best = int(np.argmin(test_mse))
        self.assertEqual(output.best_config.learning_rate,
                         output.trials[best]['learning_rate'])

    def test_all_diverged(self):
        data = small_batch()
        values = data.values.copy()
        values[:, 0, 0] = np.nan
        space = WellClass.cnn.SearchSpace(n_trials=2)
        with warnings.catch_warnings():
            warnings.simplefilter('ignore')
            self.assertRaises(TrainingError, WellClass.cnn.random_search,
                              space, WellClass.cnn.Batch(values, data.labels),
                              small_batch(seed=1), cnn_config=SMALL_CONFIG,
                              epochs=1)

class TestPersistence(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_save_load(self):
        data = small_batch()
        model = WellClass.cnn.train(
            WellClass.cnn.init_model(SMALL_CONFIG), data,
            WellClass.cnn.TrainConfig(epochs=1, batch_size=4)).model
        prefix = os.path.join(self.tmpdir, 'cnn')
        WellClass.cnn.save(model, prefix)
        loaded = WellClass.cnn.load(prefix)
        self.assertEqual(loaded.config, model.config)
        np.testing.assert_array_equal(WellClass.cnn.predict_proba(loaded,
                                                                  data.values),
                                      WellClass.cnn.predict_proba(model,
                                                                  data.values))

if __name__ == '__main__':
    unittest.main()
