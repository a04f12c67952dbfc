"""
Functions to generate, window, split and standardize labelled series.

Recorded well signals are replaced here by a statistical surrogate: each
series is a zero-mean stationary AR(1) process with a class-specific
stationary covariance across the six sensor channels, plus white sensor
noise scaled by the noise level (1, 10 or 50). Broken wells differ from
intact wells in the bending moment dispersion and in the correlation
between the accelerometers and the bending moment.

"""

import os
import collections
import multiprocessing
import warnings

import numpy as np
import scipy.signal

import WellClass.io
import WellClass.linalg
from WellClass.io import DEFAULT_CHANNELS
from WellClass.errors import ConfigError, DataError

# Labels
INTACT = 0
BROKEN = 1

# Allowed noise multipliers
NOISE_LEVELS = (1, 10, 50)

# Channels of each physical direction
DIRECTION_CHANNELS = {
    'x': ('accx_FJ', 'accx_DAS', 'bmx'),
    'y': ('accy_FJ', 'accy_DAS', 'bmy'),
}

###
# Types
###

Segment = collections.namedtuple(
    'Segment',
    ['samples', 'source_index', 'window_index', 'label'])

LabeledSeriesSet = collections.namedtuple(
    'LabeledSeriesSet',
    ['items', 'noise_level', 'seed'])

GeneratorConfig = collections.namedtuple(
    'GeneratorConfig',
    ['n_series_per_class',
     'series_len',
     'sample_rate_hz',
     'class_cov',
     'temporal_ar_coeff',
     'noise_level',
     'base_noise_std',
     'seed'])

StandardizeOutput = collections.namedtuple(
    'StandardizeOutput',
    ['train', 'test', 'mean', 'std', 'constant_columns'])

###
# Covariance presets
###

# Per-sensor standard deviations: flex joint accelerometer, DAS
# accelerometer and bending moment
_SENSOR_STD = (1.0, 0.8, 2.0)
# Correlation between the two accelerometers, which sense the same motion
_ACC_CORR = 0.95
# Correlation between the x and y directions
_DIRECTION_COUPLING = 0.6
# Angle between accelerometer and bending moment in the intact state
_INTACT_ANGLE = 60.

# Broken-state parameters of each preset: (acc-bm angle in degrees,
# bending moment variance factor)
PRESETS = {
    'slack': (45., 2.25),
    'tight': (35., 4.0),
}

def _direction_cov(angle, bm_var_factor):
    """
    Covariance of one direction, in the order (acc_FJ, acc_DAS, bm).

    """
    rho = np.cos(np.deg2rad(angle))
    corr = np.array([[1., _ACC_CORR, rho],
                     [_ACC_CORR, 1., rho],
                     [rho, rho, 1.]])
    std = np.array(_SENSOR_STD)
    std[2] *= np.sqrt(bm_var_factor)
    return corr * np.outer(std, std)

def _two_direction_cov(direction_cov):
    """
    Assemble the 6x6 covariance in `DEFAULT_CHANNELS` order.

    """
    k = _DIRECTION_COUPLING
    block = np.kron(np.array([[1., k], [k, 1.]]), direction_cov)
    # Block order is (x_FJ, x_DAS, x_bm, y_FJ, y_DAS, y_bm)
    order = [DEFAULT_CHANNELS.index(ch)
             for ch in DIRECTION_CHANNELS['x'] + DIRECTION_CHANNELS['y']]
    cov = np.zeros((6, 6))
    cov[np.ix_(order, order)] = block
    return cov

def preset_covariances(preset='slack'):
    """
    Return the intact and broken class covariances of a housing preset.

    Parameters
    ----------
    preset : {'slack', 'tight'}, optional
        Housing preset. The tight housing separates the classes more
        strongly than the slack housing.

    Returns
    -------
    numpy array
        2x6x6 array with the intact (index 0) and broken (index 1)
        stationary covariances, in `DEFAULT_CHANNELS` order.

    """
    if preset not in PRESETS:
        raise ConfigError("preset should be one of {}, got {!r}".format(
            sorted(PRESETS), preset))
    angle, bm_var_factor = PRESETS[preset]
    intact = _two_direction_cov(_direction_cov(_INTACT_ANGLE, 1.))
    broken = _two_direction_cov(_direction_cov(angle, bm_var_factor))
    return np.array([intact, broken])

def make_generator_config(preset='slack', **kwargs):
    """
    Build a validated `GeneratorConfig`.

    Parameters
    ----------
    preset : {'slack', 'tight'}, optional
        Housing preset providing `class_cov` when it is not given.
    n_series_per_class : int, optional
        Number of series per class. Default 20.
    series_len : int, optional
        Samples per series. Default 18001 (one hour at 5 Hz, endpoint
        included).
    sample_rate_hz : float, optional
        Default 5.
    class_cov : array_like, optional
        2xmxm array of stationary covariances (intact, broken).
    temporal_ar_coeff : float, optional
        AR(1) coefficient in [0, 1). Default 0.5.
    noise_level : {1, 10, 50}, optional
        Default 1.
    base_noise_std : array_like, optional
        Per-channel sensor noise std at noise level 1. Default: 2% of the
        intact channel std.
    seed : int, optional
        Non-negative seed. Default 0.

    Returns
    -------
    GeneratorConfig

    Raises
    ------
    ConfigError
        If any field is invalid. The message names the field.

    """
    fields = {'n_series_per_class': 20,
              'series_len': 18001,
              'sample_rate_hz': 5.0,
              'class_cov': None,
              'temporal_ar_coeff': 0.5,
              'noise_level': 1,
              'base_noise_std': None,
              'seed': 0}
    for key, value in kwargs.items():
        if key not in fields:
            raise ConfigError("unknown generator field {!r}".format(key))
        fields[key] = value
    if fields['class_cov'] is None:
        fields['class_cov'] = preset_covariances(preset)
    class_cov = np.array(fields['class_cov'], dtype=np.float64)
    if fields['base_noise_std'] is None and class_cov.ndim == 3:
        fields['base_noise_std'] = 0.02*np.sqrt(
            np.clip(np.diag(class_cov[0]), 0., None))
    return validate_generator_config(GeneratorConfig(**fields))

def validate_generator_config(config):
    """
    Check a `GeneratorConfig` and return it with array fields normalized.

    Class covariances must be symmetric within 1e-12 and positive
    semi-definite. Zero covariances are accepted as a degenerate case.

    Raises
    ------
    ConfigError
        If any field is invalid. The message names the field and, for a
        covariance that is not positive semi-definite, the offending
        eigenvalue.

    """
    if int(config.n_series_per_class) < 1:
        raise ConfigError("n_series_per_class should be at least 1")
    if int(config.series_len) < 2:
        raise ConfigError("series_len should be at least 2")
    if not config.sample_rate_hz > 0:
        raise ConfigError("sample_rate_hz should be positive")
    if not 0 <= config.temporal_ar_coeff < 1:
        raise ConfigError("temporal_ar_coeff should be in [0, 1), got "
                          "{}".format(config.temporal_ar_coeff))
    if config.noise_level not in NOISE_LEVELS:
        raise ConfigError("noise_level should be one of {}, got {}".format(
            NOISE_LEVELS, config.noise_level))
    if int(config.seed) < 0:
        raise ConfigError("seed should be non-negative")

    class_cov = np.array(config.class_cov, dtype=np.float64)
    if class_cov.ndim != 3 or class_cov.shape[0] != 2 \
            or class_cov.shape[1] != class_cov.shape[2]:
        raise ConfigError("class_cov should contain two square matrices, "
                          "got shape {}".format(class_cov.shape))
    m = class_cov.shape[1]
    for label, cov in enumerate(class_cov):
        if not np.all(np.isfinite(cov)):
            raise ConfigError("class_cov[{}] has non-finite entries"
                              .format(label))
        if np.max(np.abs(cov - cov.T)) > 1e-12:
            raise ConfigError("class_cov[{}] is not symmetric".format(label))
        eigenvalues, _ = WellClass.linalg.jacobi_eigh(cov)
        if eigenvalues[-1] < -1e-10:
            raise ConfigError("class_cov[{}] is not positive definite: "
                              "eigenvalue {:g}".format(label,
                                                       eigenvalues[-1]))

    base_noise_std = np.array(config.base_noise_std, dtype=np.float64)
    if base_noise_std.ndim == 0:
        base_noise_std = np.repeat(base_noise_std, m)
    if base_noise_std.shape != (m,) or np.any(base_noise_std < 0):
        raise ConfigError("base_noise_std should be {} non-negative "
                          "values".format(m))

    return config._replace(n_series_per_class=int(config.n_series_per_class),
                           series_len=int(config.series_len),
                           sample_rate_hz=float(config.sample_rate_hz),
                           class_cov=class_cov,
                           temporal_ar_coeff=float(config.temporal_ar_coeff),
                           noise_level=int(config.noise_level),
                           base_noise_std=base_noise_std,
                           seed=int(config.seed))

###
# Generation
###

def _generate_series(args):
    """
    Draw one series. Runs in worker processes when ``n_jobs > 1``.

    """
    cov_sqrt, ar_coeff, series_len, noise_std, seed, index = args
    m = cov_sqrt.shape[0]
    # Independent stream per series
    rng = np.random.default_rng([seed, index])
    z0 = rng.standard_normal(m)
    eps = rng.standard_normal((series_len, m))
    noise = rng.standard_normal((series_len, m))

    innovations = np.sqrt(1. - ar_coeff**2) * np.dot(eps, cov_sqrt)
    # Start from the stationary distribution
    innovations[0] = np.dot(z0, cov_sqrt)
    x = scipy.signal.lfilter([1.], [1., -ar_coeff], innovations, axis=0)
    return x + noise*noise_std

def generate(config, channels=DEFAULT_CHANNELS, n_jobs=1, verbose=False):
    """
    Generate a labelled set of surrogate well series.

    Each series of class c follows ``x_t = a x_{t-1} + e_t``, with
    innovation covariance ``(1 - a^2) class_cov[c]`` so that the
    stationary covariance is ``class_cov[c]``, started from a stationary
    draw. White noise of std ``noise_level * base_noise_std`` is added to
    every channel.

    Parameters
    ----------
    config : GeneratorConfig
        Generator configuration, see `make_generator_config`.
    channels : list of str, optional
        Channel names. Must match the size of the covariances.
    n_jobs : int, optional
        Number of worker processes. Serial and parallel generation give
        bitwise identical results.
    verbose : bool, optional
        Flag specifying whether to print progress.

    Returns
    -------
    LabeledSeriesSet
        ``2 * n_series_per_class`` items ``(SeriesData, label)``: intact
        series first, then broken series.

    Raises
    ------
    ConfigError
        If `config` is invalid.

    """
    config = validate_generator_config(config)
    m = config.class_cov.shape[1]
    if len(channels) != m:
        raise ConfigError("{} channel names given for {} channels".format(
            len(channels), m))

    cov_sqrts = [WellClass.linalg.sym_sqrt(cov) for cov in config.class_cov]
    noise_std = config.noise_level * config.base_noise_std
    n = config.n_series_per_class
    tasks = []
    labels = []
    for label in (INTACT, BROKEN):
        for i in range(n):
            tasks.append((cov_sqrts[label],
                          config.temporal_ar_coeff,
                          config.series_len,
                          noise_std,
                          config.seed,
                          label*n + i))
            labels.append(label)

    if verbose:
        print("Generating {} series of {} samples (noise level {})...".format(
            len(tasks), config.series_len, config.noise_level))
    if n_jobs > 1:
        pool = multiprocessing.Pool(n_jobs)
        try:
            samples = pool.map(_generate_series, tasks)
        finally:
            pool.close()
            pool.join()
    else:
        samples = [_generate_series(task) for task in tasks]

    items = tuple(
        (WellClass.io.SeriesData(x,
                                 sample_rate_hz=config.sample_rate_hz,
                                 channels=channels),
         label)
        for x, label in zip(samples, labels))
    if verbose:
        print("Done.")
    return LabeledSeriesSet(items=items,
                            noise_level=config.noise_level,
                            seed=config.seed)

def _check_consistent(items):
    first = items[0][0]
    for series, label in items:
        if label not in (INTACT, BROKEN):
            raise DataError("label should be 0 or 1, got {}".format(label))
        if series.channels != first.channels \
                or series.sample_rate_hz != first.sample_rate_hz:
            raise DataError("all series in a set should share channels and "
                            "sample rate")

def write_series_set(series_set, dirpath):
    """
    Write a `LabeledSeriesSet` to a directory.

    Each series is written as ``series_NNNN.csv`` plus its sidecar, and a
    ``set.json`` manifest lists the files along with the noise level and
    seed of the set.

    """
    if not os.path.exists(dirpath):
        os.makedirs(dirpath)
    files = []
    for i, (series, label) in enumerate(series_set.items):
        filename = 'series_{:04d}.csv'.format(i)
        WellClass.io.write_series(series,
                                  os.path.join(dirpath, filename),
                                  label=label,
                                  noise_level=series_set.noise_level,
                                  seed=series_set.seed)
        files.append(filename)
    WellClass.io.write_json({'noise_level': series_set.noise_level,
                             'seed': series_set.seed,
                             'files': files},
                            os.path.join(dirpath, 'set.json'))

def read_series_set(dirpath):
    """
    Read a `LabeledSeriesSet` written by `write_series_set`.

    Raises
    ------
    DataError
        If the manifest or a series is missing, or if the series do not
        share channels and sample rate.

    """
    manifest = WellClass.io.read_json(os.path.join(dirpath, 'set.json'))
    items = []
    for filename in manifest['files']:
        output = WellClass.io.read_series(os.path.join(dirpath, filename),
                                          full_output=True)
        if output.label is None:
            raise DataError("series {} has no label".format(filename))
        items.append((output.series, int(output.label)))
    if not items:
        raise DataError("series set {} is empty".format(dirpath))
    _check_consistent(items)
    return LabeledSeriesSet(items=tuple(items),
                            noise_level=manifest['noise_level'],
                            seed=manifest['seed'])

def resolve_channels(channels):
    """
    Translate a channel selection into a tuple of names or None.

    Parameters
    ----------
    channels : None, 'all', 'x', 'y' or list of str
        'x' and 'y' select the three channels of one physical direction.
        None and 'all' select every channel.

    """
    if channels is None or channels == 'all':
        return None
    if isinstance(channels, str):
        if channels in DIRECTION_CHANNELS:
            return DIRECTION_CHANNELS[channels]
        return (channels,)
    return tuple(channels)

###
# Windowing and splitting
###

def window(series_set, window_seconds=60.):
    """
    Cut every series into consecutive non-overlapping windows.

    The window length is ``round(window_seconds * sample_rate_hz)``
    samples. A trailing remainder shorter than the window is dropped.

    Parameters
    ----------
    series_set : LabeledSeriesSet
        Series to window.
    window_seconds : float, optional
        Window length in seconds.

    Returns
    -------
    list of Segment
        Segments ordered by source series, then by time. Each segment's
        samples are a read-only view of its source.

    Raises
    ------
    DataError
        If the window is shorter than 2 samples or longer than a series.

    """
    segments = []
    for source_index, (series, label) in enumerate(series_set.items):
        n_w = int(round(window_seconds * series.sample_rate_hz))
        n = series.shape[0]
        if n_w < 2:
            raise DataError("window of {} s is shorter than 2 samples"
                            .format(window_seconds))
        if n_w > n:
            raise DataError("window of {} samples is longer than series {} "
                            "({} samples)".format(n_w, source_index, n))
        for k in range(n // n_w):
            segments.append(Segment(samples=series[k*n_w:(k+1)*n_w],
                                    source_index=source_index,
                                    window_index=k,
                                    label=label))
    return segments

def _stratified_quotas(class_counts, n_test):
    """
    Split `n_test` among classes proportionally, by largest remainder.

    """
    total = sum(class_counts)
    exact = [n_test*float(c)/total for c in class_counts]
    quotas = [int(np.floor(q + 1e-9)) for q in exact]
    remainders = [q - f for q, f in zip(exact, quotas)]
    # Stable: ties go to the lower label
    order = sorted(range(len(class_counts)),
                   key=lambda c: -remainders[c])
    for c in order[:n_test - sum(quotas)]:
        quotas[c] += 1
    return [min(q, c) for q, c in zip(quotas, class_counts)]

def split(segments, test_fraction=0.2, seed=0):
    """
    Split segments into a training and a test set, stratified by label.

    The test set holds ``round(test_fraction * N)`` segments, clipped to
    ``[1, N - 1]``, distributed among the classes in proportion to their
    size. Both sets are returned in a seeded random order.

    Parameters
    ----------
    segments : list of Segment
        Segments to split.
    test_fraction : float, optional
        Fraction of segments in the test set, in (0, 1).
    seed : int, optional
        Seed of the shuffle.

    Returns
    -------
    train, test : list of Segment

    Raises
    ------
    ConfigError
        If `test_fraction` is not in (0, 1).
    DataError
        If there are fewer than 2 segments or a class is missing.

    """
    if not 0 < test_fraction < 1:
        raise ConfigError("test_fraction should be in (0, 1), got {}".format(
            test_fraction))
    labels = np.array([s.label for s in segments], dtype=int)
    n = len(labels)
    if n < 2:
        raise DataError("at least 2 segments required to split, got {}"
                        .format(n))
    class_indices = [np.flatnonzero(labels == c) for c in (INTACT, BROKEN)]
    if any(len(idx) == 0 for idx in class_indices):
        raise DataError("both classes should be present to split")

    n_test = int(np.floor(test_fraction*n + 0.5))
    n_test = min(max(n_test, 1), n - 1)
    quotas = _stratified_quotas([len(idx) for idx in class_indices], n_test)

    rng = np.random.default_rng(seed)
    train_idx = []
    test_idx = []
    for idx, quota in zip(class_indices, quotas):
        perm = rng.permutation(idx)
        test_idx.extend(perm[:quota])
        train_idx.extend(perm[quota:])
    train_idx = rng.permutation(np.array(train_idx, dtype=int))
    test_idx = rng.permutation(np.array(test_idx, dtype=int))
    return ([segments[i] for i in train_idx],
            [segments[i] for i in test_idx])

def stack_segments(segments, channels=None):
    """
    Stack segment samples into a (B, m, n_w) array and a label vector.

    This is the channel-first layout expected by `WellClass.cnn`.

    """
    if not segments:
        raise DataError("no segments to stack")
    channels = resolve_channels(channels)
    arrays = []
    for s in segments:
        samples = s.samples if channels is None else s.samples[:, channels]
        arrays.append(np.asarray(samples).T)
    lengths = set(a.shape for a in arrays)
    if len(lengths) != 1:
        raise DataError("segments have different shapes: {}".format(
            sorted(lengths)))
    return np.array(arrays), np.array([s.label for s in segments], dtype=int)

###
# Standardization
###

def standardize(train, test=None):
    """
    Scale feature columns to zero mean and unit variance.

    Statistics are computed on `train` only, with the population standard
    deviation (divisor N), and applied to both `train` and `test`.
    Columns of `train` with a standard deviation not above 1e-12 are left
    unscaled (std replaced by 1) and a warning is issued.

    Parameters
    ----------
    train : FeatureMatrix or array_like
        NxD training features.
    test : FeatureMatrix or array_like, optional
        MxD test features.

    Returns
    -------
    StandardizeOutput
        Namedtuple with fields ``train``, ``test`` (same type as the
        inputs, None if `test` was not given), ``mean``, ``std`` and
        ``constant_columns`` (indices of replaced columns).

    Raises
    ------
    DataError
        If `train` is empty or the column counts do not match.

    """
    def values_of(x):
        return np.asarray(x.values if hasattr(x, 'feature_names') else x,
                          dtype=np.float64)

    def rebuild(x, values):
        if hasattr(x, 'feature_names'):
            return x._replace(values=values)
        return values

    train_values = values_of(train)
    if train_values.ndim != 2 or train_values.shape[0] < 1:
        raise DataError("training features should be a non-empty 2D array")
    mu = np.mean(train_values, axis=0)
    sigma = np.std(train_values, axis=0)
    constant = np.flatnonzero(sigma <= 1e-12)
    if constant.size:
        warnings.warn("constant feature column(s) {}: standard deviation "
                      "replaced by 1".format(constant.tolist()))
        sigma[constant] = 1.

    train_out = rebuild(train, (train_values - mu) / sigma)
    test_out = None
    if test is not None:
        test_values = values_of(test)
        if test_values.ndim != 2 or test_values.shape[1] != mu.size:
            raise DataError("test features should have {} columns".format(
                mu.size))
        test_out = rebuild(test, (test_values - mu) / sigma)
    return StandardizeOutput(train=train_out,
                             test=test_out,
                             mean=mu,
                             std=sigma,
                             constant_columns=constant)
