"""
One-dimensional convolutional network for raw segment classification.

The network maps a (channels x samples) segment to the probability that
the well is broken::

    [conv -> activation -> average pool] x n_conv -> flatten
        -> fc1 -> activation (embedding) -> fc2 -> sigmoid

Convolutions are valid (no padding) cross-correlations with stride 1.
With the default configuration a 6x300 segment goes through
12x271 -> 12x52 -> 24x23 -> 24x2 -> 48 -> 2 -> 1.

Forward and backward passes are written out with numpy in double
precision, training uses mini-batch Adam on the mean squared error, and
`grad_check` verifies the backward pass against finite differences.

"""

import collections
import multiprocessing
import warnings

import numpy as np
import scipy.special
from numpy.lib.stride_tricks import sliding_window_view

import WellClass.io
from WellClass.errors import ConfigError, DataError, TrainingError

CnnConfig = collections.namedtuple(
    'CnnConfig',
    ['in_channels', 'input_length', 'conv_layers', 'pool_kernel',
     'pool_stride', 'fc_hidden', 'activation', 'seed'],
    defaults=[6, 300, ((12, 30), (24, 30)), 15, 5, 2, 'leaky_relu', 1])

CnnModel = collections.namedtuple(
    'CnnModel',
    ['config', 'params', 'channel_mean', 'channel_std'],
    defaults=[None, None])

TrainConfig = collections.namedtuple(
    'TrainConfig',
    ['epochs', 'batch_size', 'learning_rate', 'weight_decay', 'adam_betas',
     'adam_eps', 'seed'],
    defaults=[100, 30, 1e-3, 0., (0.9, 0.999), 1e-8, 1])

SearchSpace = collections.namedtuple(
    'SearchSpace',
    ['activations', 'learning_rate', 'weight_decay', 'batch_sizes',
     'n_trials'],
    defaults=[('tanh', 'swish', 'sigmoid', 'relu', 'leaky_relu'),
              (1e-4, 1e-1),
              (1e-7, 5e-4),
              (10, 30, 50, 100),
              100])

# Segments in channel-first layout, with their labels
Batch = collections.namedtuple('Batch', ['values', 'labels'])

LEAKY_SLOPE = 0.01

###
# Activations
###

def _sigmoid(z):
    return scipy.special.expit(z)

def _d_sigmoid(z):
    s = scipy.special.expit(z)
    return s*(1. - s)

def _swish(z):
    return z*scipy.special.expit(z)

def _d_swish(z):
    s = scipy.special.expit(z)
    return s + z*s*(1. - s)

ACTIVATIONS = {
    'tanh': (np.tanh, lambda z: 1. - np.tanh(z)**2),
    'sigmoid': (_sigmoid, _d_sigmoid),
    'swish': (_swish, _d_swish),
    'relu': (lambda z: np.maximum(z, 0.),
             lambda z: (z > 0).astype(np.float64)),
    'leaky_relu': (lambda z: np.where(z > 0, z, LEAKY_SLOPE*z),
                   lambda z: np.where(z > 0, 1., LEAKY_SLOPE)),
}

# Activations with a kink at zero
PIECEWISE_LINEAR = ('relu', 'leaky_relu')

###
# Layers
###

def conv1d_forward(x, filters, bias, layer='conv'):
    """
    Valid 1D cross-correlation with stride 1.

    ``out[c, i] = bias[c] + sum_{c', j} filters[c, c', j] x[c', i + j]``

    Parameters
    ----------
    x : numpy array
        Input of shape (C_in, L) or (B, C_in, L).
    filters : numpy array
        (C_out, C_in, k) filters.
    bias : numpy array
        (C_out,) biases.
    layer : str, optional
        Layer name used in error messages.

    Returns
    -------
    numpy array
        Output of shape (C_out, L-k+1) or (B, C_out, L-k+1).

    Raises
    ------
    DataError
        If ``L < k`` or the input channels do not match the filters.

    """
    squeeze = x.ndim == 2
    if squeeze:
        x = x[np.newaxis]
    c_out, c_in, k = filters.shape
    if x.shape[1] != c_in:
        raise DataError("{}: expected {} input channels, got {}".format(
            layer, c_in, x.shape[1]))
    if x.shape[2] < k:
        raise DataError("{}: input length {} shorter than kernel {}".format(
            layer, x.shape[2], k))
    windows = sliding_window_view(x, k, axis=2)
    # (B, L', C_out) -> (B, C_out, L')
    out = np.tensordot(windows, filters, axes=([1, 3], [1, 2]))
    out = out.transpose(0, 2, 1) + bias[np.newaxis, :, np.newaxis]
    return out[0] if squeeze else out

def conv1d_backward(dout, x, filters, need_dx=True):
    """
    Gradients of `conv1d_forward` with respect to its filters, bias and
    input, for batched input.

    """
    k = filters.shape[2]
    windows = sliding_window_view(x, k, axis=2)
    d_filters = np.tensordot(dout, windows, axes=([0, 2], [0, 2]))
    d_bias = np.sum(dout, axis=(0, 2))
    dx = None
    if need_dx:
        dx = np.zeros_like(x)
        length = dout.shape[2]
        for j in range(k):
            dx[:, :, j:j + length] += np.matmul(filters[:, :, j].T, dout)
    return d_filters, d_bias, dx

def pool_length(length, kernel=15, stride=5):
    return (length - kernel) // stride + 1

def avgpool_forward(x, kernel=15, stride=5, layer='pool'):
    """
    Average pooling without padding.

    Parameters
    ----------
    x : numpy array
        Input of shape (C, L) or (B, C, L).
    kernel, stride : int, optional

    Returns
    -------
    numpy array
        Window means, of length ``floor((L - kernel) / stride) + 1``.

    Raises
    ------
    DataError
        If ``L < kernel``.

    """
    if x.shape[-1] < kernel:
        raise DataError("{}: input length {} shorter than kernel {}".format(
            layer, x.shape[-1], kernel))
    windows = sliding_window_view(x, kernel, axis=-1)[..., ::stride, :]
    return np.mean(windows, axis=-1)

def avgpool_backward(dout, input_length, kernel=15, stride=5):
    """
    Gradient of `avgpool_forward` with respect to its input.

    """
    dx = np.zeros(dout.shape[:-1] + (input_length,))
    n_out = dout.shape[-1]
    share = dout / kernel
    for t in range(kernel):
        dx[..., t:t + stride*(n_out - 1) + 1:stride] += share
    return dx

###
# Model
###

def shape_chain(config, input_length=None):
    """
    Shapes of the intermediate tensors for one segment.

    Returns
    -------
    list of tuple
        Input shape, then the shape after every convolution and pooling,
        then the flatten size, the embedding size and the output size.

    """
    if input_length is None:
        input_length = config.input_length
    shapes = [(config.in_channels, input_length)]
    channels, length = config.in_channels, input_length
    for out_channels, k in config.conv_layers:
        length = length - k + 1
        channels = out_channels
        shapes.append((channels, length))
        length = pool_length(length, config.pool_kernel, config.pool_stride)
        shapes.append((channels, length))
    shapes.append((channels*length,))
    shapes.append((config.fc_hidden,))
    shapes.append((1,))
    return shapes

def validate_config(config):
    if config.activation not in ACTIVATIONS:
        raise ConfigError("activation should be one of {}, got {!r}".format(
            sorted(ACTIVATIONS), config.activation))
    if int(config.in_channels) < 1 or int(config.fc_hidden) < 1:
        raise ConfigError("in_channels and fc_hidden should be positive")
    length = int(config.input_length)
    for l, (out_channels, k) in enumerate(config.conv_layers, 1):
        if int(out_channels) < 1 or int(k) < 1:
            raise ConfigError("conv{}: invalid layer {}".format(
                l, (out_channels, k)))
        length = length - k + 1
        if length < config.pool_kernel:
            raise ConfigError("conv{}: input length {} too short for the "
                              "configured layers".format(
                                  l, config.input_length))
        length = pool_length(length, config.pool_kernel, config.pool_stride)
    return config

def param_names(config):
    names = []
    for l in range(1, len(config.conv_layers) + 1):
        names += ['conv{}.weight'.format(l), 'conv{}.bias'.format(l)]
    return names + ['fc1.weight', 'fc1.bias', 'fc2.weight', 'fc2.bias']

def init_model(config=None):
    """
    Initialize a network.

    Every tensor is drawn uniformly in ``+-1/sqrt(fan_in)``, in the order
    of `param_names`, from a generator seeded with ``config.seed``.

    """
    if config is None:
        config = CnnConfig()
    validate_config(config)
    rng = np.random.default_rng(config.seed)
    params = collections.OrderedDict()
    channels = config.in_channels
    for l, (out_channels, k) in enumerate(config.conv_layers, 1):
        bound = 1. / np.sqrt(channels*k)
        params['conv{}.weight'.format(l)] = rng.uniform(
            -bound, bound, (out_channels, channels, k))
        params['conv{}.bias'.format(l)] = rng.uniform(
            -bound, bound, out_channels)
        channels = out_channels
    flat = shape_chain(config)[-3][0]
    bound = 1. / np.sqrt(flat)
    params['fc1.weight'] = rng.uniform(-bound, bound,
                                       (config.fc_hidden, flat))
    params['fc1.bias'] = rng.uniform(-bound, bound, config.fc_hidden)
    bound = 1. / np.sqrt(config.fc_hidden)
    params['fc2.weight'] = rng.uniform(-bound, bound, (1, config.fc_hidden))
    params['fc2.bias'] = rng.uniform(-bound, bound, 1)
    return CnnModel(config=config, params=params)

def _as_batch(x):
    x = np.asarray(x.values if hasattr(x, 'values')
                   and not isinstance(x, np.ndarray) else x,
                   dtype=np.float64)
    if x.ndim == 2:
        x = x[np.newaxis]
    if x.ndim != 3:
        raise DataError("input should have shape (B, C, L), got {}".format(
            x.shape))
    return x

def _normalized(model, x):
    if model.channel_mean is None:
        return x
    return (x - model.channel_mean[np.newaxis, :, np.newaxis]) \
        / model.channel_std[np.newaxis, :, np.newaxis]

def _forward(model, x):
    """
    Forward pass keeping the intermediate tensors for backpropagation.

    """
    config = model.config
    params = model.params
    act = ACTIVATIONS[config.activation][0]
    layers = []
    h = x
    for l in range(1, len(config.conv_layers) + 1):
        z = conv1d_forward(h,
                           params['conv{}.weight'.format(l)],
                           params['conv{}.bias'.format(l)],
                           layer='conv{}'.format(l))
        a = act(z)
        p = avgpool_forward(a, config.pool_kernel, config.pool_stride,
                            layer='pool{}'.format(l))
        layers.append((h, z))
        h = p
    flat = h.reshape(h.shape[0], -1)
    w1 = params['fc1.weight']
    if flat.shape[1] != w1.shape[1]:
        raise DataError("fc1: expected {} inputs, got {} (input length {})"
                        .format(w1.shape[1], flat.shape[1], x.shape[2]))
    z1 = np.dot(flat, w1.T) + params['fc1.bias']
    embedding = act(z1)
    z2 = np.dot(embedding, params['fc2.weight'].T) + params['fc2.bias']
    probs = scipy.special.expit(z2[:, 0])
    cache = {'layers': layers, 'pooled_shape': h.shape, 'flat': flat,
             'z1': z1, 'embedding': embedding}
    return probs, cache

def forward(model, x):
    """
    Run the network on a batch.

    Parameters
    ----------
    model : CnnModel
    x : numpy array or Batch
        (B, C, L) segments, or a single (C, L) segment.

    Returns
    -------
    probs : numpy array
        B probabilities of the broken class.
    embedding : numpy array
        (B, fc_hidden) activations after the first fully connected layer.

    Raises
    ------
    DataError
        If the shapes do not match. The message names the failing layer.

    """
    x = _normalized(model, _as_batch(x))
    probs, cache = _forward(model, x)
    return probs, cache['embedding']

def _loss_and_grads(model, x, y):
    """
    Mean squared error of a batch and its gradient for every parameter.

    """
    config = model.config
    params = model.params
    d_act = ACTIVATIONS[config.activation][1]
    probs, cache = _forward(model, x)
    B = x.shape[0]
    loss = np.mean((probs - y)**2)

    grads = collections.OrderedDict()
    dz2 = (2./B*(probs - y)*probs*(1. - probs))[:, np.newaxis]
    grads['fc2.weight'] = np.dot(dz2.T, cache['embedding'])
    grads['fc2.bias'] = np.sum(dz2, axis=0)
    dz1 = np.dot(dz2, params['fc2.weight'])*d_act(cache['z1'])
    grads['fc1.weight'] = np.dot(dz1.T, cache['flat'])
    grads['fc1.bias'] = np.sum(dz1, axis=0)
    dh = np.dot(dz1, params['fc1.weight']).reshape(cache['pooled_shape'])

    for l in range(len(config.conv_layers), 0, -1):
        h, z = cache['layers'][l - 1]
        da = avgpool_backward(dh, z.shape[2], config.pool_kernel,
                              config.pool_stride)
        dz = da*d_act(z)
        dw, db, dh = conv1d_backward(dz, h, params['conv{}.weight'.format(l)],
                                     need_dx=l > 1)
        grads['conv{}.weight'.format(l)] = dw
        grads['conv{}.bias'.format(l)] = db
    return loss, grads

def mse(model, data):
    """
    Mean squared error of the network on a Batch.

    """
    probs, _ = forward(model, data.values)
    return float(np.mean((probs - np.asarray(data.labels))**2))

def predict_proba(model, x):
    return forward(model, x)[0]

def predict(model, x):
    """
    Predicted labels: 1 where the probability is at least 0.5, else 0.

    """
    return (predict_proba(model, x) >= 0.5).astype(int)

def embed(model, x):
    return forward(model, x)[1]

###
# Normalization
###

def channel_statistics(values):
    """
    Per-channel mean and population std of (B, C, L) segments.

    Channels with zero spread get a std of 1.

    """
    values = _as_batch(values)
    mean = np.mean(values, axis=(0, 2))
    std = np.std(values, axis=(0, 2))
    std[std <= 1e-12] = 1.
    return mean, std

def with_normalization(model, values):
    """
    Attach per-channel normalization computed on training segments.

    """
    mean, std = channel_statistics(values)
    return model._replace(channel_mean=mean, channel_std=std)

###
# Training
###

def validate_train_config(config):
    if int(config.epochs) < 0:
        raise ConfigError("epochs should be non-negative")
    if int(config.batch_size) < 1:
        raise ConfigError("batch_size should be positive")
    if not config.learning_rate >= 0:
        raise ConfigError("learning_rate should be non-negative")
    if not config.weight_decay >= 0:
        raise ConfigError("weight_decay should be non-negative")
    return config

def train(model, data, config=None, test_data=None, verbose=False):
    """
    Train a network with mini-batch Adam on the mean squared error.

    Weight decay is added to the gradient as ``weight_decay * theta``
    before the Adam moment updates. Samples are shuffled at every epoch
    with a generator seeded by ``(config.seed, epoch)``.

    Parameters
    ----------
    model : CnnModel
        Initial network. It is not modified.
    data : Batch
        Training segments (B, C, L) and labels in {0, 1}. If the model has
        no normalization yet, per-channel statistics of `data` are
        attached.
    config : TrainConfig, optional
    test_data : Batch, optional
        Segments on which the test MSE is recorded after every epoch.
    verbose : bool, optional
        Flag specifying whether to print the MSE after every epoch.

    Returns
    -------
    model : CnnModel
        Trained network.
    train_mse : list of float
        Mean training loss of every epoch.
    test_mse : list of float
        Test MSE after every epoch (empty without `test_data`).

    Raises
    ------
    TrainingError
        If the loss becomes non-finite. The message gives the epoch and
        batch index.

    """
    if config is None:
        config = TrainConfig()
    validate_train_config(config)
    x = _as_batch(data.values)
    y = np.asarray(data.labels, dtype=np.float64).ravel()
    if x.shape[0] != y.size:
        raise DataError("{} segments but {} labels".format(x.shape[0],
                                                           y.size))
    if not np.all((y == 0) | (y == 1)):
        raise DataError("labels should be 0 or 1")
    if model.channel_mean is None:
        model = with_normalization(model, x)
    x = _normalized(model, x)

    params = collections.OrderedDict(
        (name, value.copy()) for name, value in model.params.items())
    model = model._replace(params=params)
    beta1, beta2 = config.adam_betas
    m = {name: np.zeros_like(value) for name, value in params.items()}
    v = {name: np.zeros_like(value) for name, value in params.items()}
    t = 0
    n = y.size
    batch_size = int(config.batch_size)
    train_mse = []
    test_mse = []
    for epoch in range(int(config.epochs)):
        order = np.random.default_rng([config.seed, epoch]).permutation(n)
        epoch_loss = 0.
        for b, start in enumerate(range(0, n, batch_size)):
            idx = order[start:start + batch_size]
            loss, grads = _loss_and_grads(model, x[idx], y[idx])
            if not np.isfinite(loss):
                raise TrainingError("non-finite loss at epoch {}, batch {}"
                                    .format(epoch, b))
            epoch_loss += loss*idx.size
            t += 1
            for name, value in params.items():
                g = grads[name] + config.weight_decay*value
                m[name] = beta1*m[name] + (1. - beta1)*g
                v[name] = beta2*v[name] + (1. - beta2)*g*g
                m_hat = m[name] / (1. - beta1**t)
                v_hat = v[name] / (1. - beta2**t)
                value -= config.learning_rate*m_hat \
                    / (np.sqrt(v_hat) + config.adam_eps)
        train_mse.append(epoch_loss / n)
        if test_data is not None:
            test_mse.append(mse(model, test_data))
        if verbose:
            print("Epoch {}: train MSE {:.6g}{}".format(
                epoch + 1, train_mse[-1],
                ", test MSE {:.6g}".format(test_mse[-1]) if test_mse else ""))

    TrainOutput = collections.namedtuple(
        'TrainOutput',
        ['model', 'train_mse', 'test_mse'])
    return TrainOutput(model=model, train_mse=train_mse, test_mse=test_mse)

###
# Gradient check
###

def _kink_patterns(model, x):
    _, cache = _forward(model, x)
    return [z > 0 for _, z in cache['layers']] + [cache['z1'] > 0]

def grad_check(model, x, y, eps=1e-5, fraction=0.01, seed=0):
    """
    Compare analytic gradients with central finite differences.

    A random subset of `fraction` of the entries of every tensor (at
    least one) is checked. For piecewise linear activations, entries whose
    perturbation moves a pre-activation across zero are excluded.

    Parameters
    ----------
    model : CnnModel
    x : numpy array
        (B, C, L) segments, already normalized.
    y : numpy array
        Labels in {0, 1}.
    eps : float, optional
        Finite difference step.
    fraction : float, optional
    seed : int, optional
        Seed of the entry sampling.

    Returns
    -------
    float
        Maximum of ``|g_a - g_n| / max(|g_a| + |g_n|, 1e-8)`` over the
        checked entries.

    """
    x = _as_batch(x)
    y = np.asarray(y, dtype=np.float64).ravel()
    params = collections.OrderedDict(
        (name, value.copy()) for name, value in model.params.items())
    model = model._replace(params=params, channel_mean=None, channel_std=None)
    _, grads = _loss_and_grads(model, x, y)
    rng = np.random.default_rng(seed)
    piecewise = model.config.activation in PIECEWISE_LINEAR

    max_error = 0.
    for name, value in params.items():
        flat = value.reshape(-1)
        n_check = max(1, int(round(fraction*flat.size)))
        for i in rng.choice(flat.size, size=n_check, replace=False):
            original = flat[i]
            flat[i] = original + eps
            loss_plus = _loss_and_grads(model, x, y)[0]
            patterns_plus = _kink_patterns(model, x) if piecewise else None
            flat[i] = original - eps
            loss_minus = _loss_and_grads(model, x, y)[0]
            patterns_minus = _kink_patterns(model, x) if piecewise else None
            flat[i] = original
            if piecewise and any(np.any(a != b) for a, b in
                                 zip(patterns_plus, patterns_minus)):
                continue
            g_n = (loss_plus - loss_minus) / (2.*eps)
            g_a = grads[name].reshape(-1)[i]
            error = abs(g_a - g_n) / max(abs(g_a) + abs(g_n), 1e-8)
            max_error = max(max_error, error)
    return max_error

###
# Hyperparameter search
###

def sample_trial(space, seed, trial):
    """
    Draw the hyperparameters of one trial.

    Activation and batch size are drawn uniformly from their sets, the
    learning rate and weight decay log-uniformly within their ranges. Each
    trial uses a generator seeded by ``(seed, trial)``.

    """
    rng = np.random.default_rng([seed, trial])
    activation = space.activations[rng.integers(len(space.activations))]
    lo, hi = np.log10(space.learning_rate)
    learning_rate = 10.**rng.uniform(lo, hi)
    lo, hi = np.log10(space.weight_decay)
    weight_decay = 10.**rng.uniform(lo, hi)
    batch_size = space.batch_sizes[rng.integers(len(space.batch_sizes))]
    return {'activation': activation,
            'learning_rate': float(learning_rate),
            'weight_decay': float(weight_decay),
            'batch_size': int(batch_size)}

def _run_trial(args):
    """
    Train and score one trial. Runs in worker processes when
    ``n_jobs > 1``.

    """
    trial, params, cnn_config, epochs, seed, data, test_data = args
    model = init_model(cnn_config._replace(activation=params['activation']))
    train_config = TrainConfig(epochs=epochs,
                               batch_size=params['batch_size'],
                               learning_rate=params['learning_rate'],
                               weight_decay=params['weight_decay'],
                               seed=seed)
    record = dict(params, trial=trial, epochs=epochs)
    try:
        output = train(model, data, train_config, test_data=test_data)
    except TrainingError as e:
        record.update(status='diverged', error=str(e),
                      train_mse=None, test_mse=None)
        return record, None
    record.update(status='ok',
                  train_mse=output.train_mse[-1] if output.train_mse
                  else None,
                  test_mse=output.test_mse[-1] if output.test_mse
                  else mse(output.model, data))
    return record, output.model

def random_search(space, data, test_data, cnn_config=None, epochs=100,
                  seed=0, n_jobs=1, log_path=None, verbose=False):
    """
    Random search of training hyperparameters.

    Parameters
    ----------
    space : SearchSpace
        Distributions to sample from, and number of trials.
    data, test_data : Batch
        Training and test segments. The best trial has the lowest final
        test MSE; ties go to the earliest trial.
    cnn_config : CnnConfig, optional
        Architecture. The activation is overridden by every trial.
    epochs : int, optional
    seed : int, optional
    n_jobs : int, optional
        Number of worker processes.
    log_path : str, optional
        If given, the trial log is written there as JSON lines.
    verbose : bool, optional

    Returns
    -------
    best_config : TrainConfig
    best_activation : str
    best_model : CnnModel
    trials : list of dict
        One record per trial with its hyperparameters, status and MSEs.

    Raises
    ------
    ConfigError
        If ``space.n_trials < 1``.
    TrainingError
        If every trial diverged.

    """
    if int(space.n_trials) < 1:
        raise ConfigError("n_trials should be at least 1")
    if cnn_config is None:
        cnn_config = CnnConfig()
    tasks = [(trial, sample_trial(space, seed, trial), cnn_config, epochs,
              seed, data, test_data)
             for trial in range(int(space.n_trials))]
    if verbose:
        print("Running {} trials of {} epochs...".format(len(tasks), epochs))
    if n_jobs > 1:
        pool = multiprocessing.Pool(n_jobs)
        try:
            results = pool.map(_run_trial, tasks)
        finally:
            pool.close()
            pool.join()
    else:
        results = [_run_trial(task) for task in tasks]

    trials = [record for record, _ in results]
    if log_path is not None:
        WellClass.io.write_jsonl(trials, log_path)
    best = None
    for k, (record, _) in enumerate(results):
        if record['status'] != 'ok':
            warnings.warn("trial {} diverged: {}".format(record['trial'],
                                                         record['error']))
            continue
        if best is None or record['test_mse'] < results[best][0]['test_mse']:
            best = k
        if verbose:
            print("Trial {}: test MSE {:.6g}".format(record['trial'],
                                                     record['test_mse']))
    if best is None:
        raise TrainingError("all {} trials diverged".format(len(trials)))

    record, best_model = results[best]
    SearchOutput = collections.namedtuple(
        'SearchOutput',
        ['best_config', 'best_activation', 'best_model', 'trials'])
    return SearchOutput(best_config=TrainConfig(
                            epochs=epochs,
                            batch_size=record['batch_size'],
                            learning_rate=record['learning_rate'],
                            weight_decay=record['weight_decay'],
                            seed=seed),
                        best_activation=record['activation'],
                        best_model=best_model,
                        trials=trials)

###
# Persistence
###

def save(model, path_prefix):
    """
    Write a checkpoint: ``<path_prefix>.bin`` with the parameters and
    ``<path_prefix>.json`` with the manifest, configuration and
    normalization statistics.

    """
    extra = {'config': model.config._asdict(),
             'channel_mean': model.channel_mean,
             'channel_std': model.channel_std}
    WellClass.io.write_tensors(model.params, path_prefix, extra=extra)

def load(path_prefix):
    params, manifest = WellClass.io.read_tensors(path_prefix)
    fields = dict(manifest['config'])
    fields['conv_layers'] = tuple(tuple(int(v) for v in layer)
                                  for layer in fields['conv_layers'])
    config = CnnConfig(**fields)
    mean = manifest.get('channel_mean')
    std = manifest.get('channel_std')
    return CnnModel(config=config,
                    params=params,
                    channel_mean=None if mean is None else np.array(mean),
                    channel_std=None if std is None else np.array(std))
