"""
Command line interface and pipeline driver.

The pipeline windows a labelled series set into one-minute segments,
splits them into training and test sets, transforms and standardizes the
segments, optionally projects them onto principal components, and trains
and evaluates one or more classifiers. The convolutional network consumes
the raw segments instead of features. Every intermediate (features,
preprocessing statistics, models, reports) is written to the output
directory.

Subcommands::

    wellclass generate     # write a surrogate series set
    wellclass transform    # segment features of a series set
    wellclass pca          # principal components of a feature file
    wellclass baseline     # regression lines of one-minute STDs
    wellclass train METHOD # pipeline with one classifier
    wellclass compare      # pipeline with all four classifiers
    wellclass evaluate     # apply a trained pipeline to another set
    wellclass emit-plots   # CSV bundles (and optional PNGs) of a run
    wellclass sweep        # accuracy per noise level and number of PCs

Exit codes: 0 on success, 2 on configuration errors, 3 on data errors and
4 on training failures.

"""

import argparse
import collections
import hashlib
import json
import os
import sys
import time

import numpy as np
import pandas as pd

import WellClass
import WellClass.io
import WellClass.dataset
import WellClass.transform
import WellClass.pca
import WellClass.baseline
import WellClass.logreg
import WellClass.dtree
import WellClass.svm
import WellClass.cnn
import WellClass.evaluate
from WellClass.errors import ConfigError, DataError, TrainingError

METHODS = ('logreg', 'dtree', 'svm', 'cnn')
PIPELINE_METHODS = METHODS + ('baseline', 'all')
PRUNE_MODES = ('none', 'pre', 'post')

PipelineConfig = collections.namedtuple(
    'PipelineConfig',
    ['transform', 'pcs', 'method', 'noise', 'seed', 'preset',
     'n_per_class', 'series_len', 'window_seconds', 'test_fraction',
     'channels', 'data_dir', 'out_dir', 'xlsx',
     'logreg', 'dtree', 'svm', 'cnn', 'baseline'],
    defaults=['cov', 4, 'logreg', 1, 0, 'slack', 20, 18001, 60., 0.2,
              'all', None, 'wellclass_output', False,
              None, None, None, None, None])

PipelineOutput = collections.namedtuple(
    'PipelineOutput',
    ['table', 'reports', 'config_hash', 'out_dir'])

# Settings of every method section, with their defaults
SECTION_DEFAULTS = {
    'logreg': dict(WellClass.logreg.LogRConfig()._asdict()),
    'dtree': {'criterion': 'gini',
              'prune': 'none',
              'ccp_alpha': None,
              'max_depth': None,
              'min_samples_split': 2,
              'min_samples_leaf': 1,
              'k_folds': 5,
              'n_jobs': 1},
    'svm': {'kernel': 'linear',
            'C': 1.0,
            'gamma': 'scale',
            'tol': 1e-3,
            'tune': False,
            'c_grid': [0.1, 1., 10.]},
    'cnn': {'trials': 0,
            'epochs': 100,
            'batch_size': 30,
            'learning_rate': 1e-3,
            'weight_decay': 0.,
            'activation': 'leaky_relu',
            'n_jobs': 1},
    'baseline': dict(WellClass.baseline.MonitorConfig()._asdict()),
}

# Files, relative to the output directory, holding the fitted models
MODEL_FILES = {'logreg': 'logreg.json',
               'dtree': 'dtree.json',
               'svm': 'svm.json',
               'cnn': 'cnn'}

###
# Configuration
###

def _section(cfg, name):
    """
    Settings of a method section merged over their defaults.

    """
    given = getattr(cfg, name) or {}
    if not isinstance(given, dict):
        raise ConfigError("{}: section should be a mapping".format(name))
    settings = dict(SECTION_DEFAULTS[name])
    for key, value in given.items():
        if key not in settings:
            raise ConfigError("{}.{}: unknown field".format(name, key))
        settings[key] = value
    return settings

def logreg_config(cfg):
    return WellClass.logreg.validate_config(
        WellClass.logreg.LogRConfig(**_section(cfg, 'logreg')))

def tree_settings(cfg):
    settings = _section(cfg, 'dtree')
    if settings['criterion'] not in WellClass.dtree.CRITERIA:
        raise ConfigError("dtree.criterion should be one of {}, got {!r}"
                          .format(WellClass.dtree.CRITERIA,
                                  settings['criterion']))
    if settings['prune'] not in PRUNE_MODES:
        raise ConfigError("dtree.prune should be one of {}, got {!r}".format(
            PRUNE_MODES, settings['prune']))
    if settings['ccp_alpha'] is not None and not settings['ccp_alpha'] >= 0:
        raise ConfigError("dtree.ccp_alpha should be non-negative")
    if int(settings['k_folds']) < 2:
        raise ConfigError("dtree.k_folds should be at least 2")
    WellClass.dtree.validate_config(_tree_config(settings))
    return settings

def _tree_config(settings, ccp_alpha=None):
    if ccp_alpha is None:
        ccp_alpha = settings['ccp_alpha'] or 0.
    return WellClass.dtree.TreeConfig(
        criterion=settings['criterion'],
        max_depth=settings['max_depth'],
        min_samples_split=settings['min_samples_split'],
        min_samples_leaf=settings['min_samples_leaf'],
        ccp_alpha=ccp_alpha)

def svm_settings(cfg):
    settings = _section(cfg, 'svm')
    if settings['kernel'] not in WellClass.svm.KERNELS:
        raise ConfigError("svm.kernel should be one of {}, got {!r}".format(
            WellClass.svm.KERNELS, settings['kernel']))
    if not settings['C'] > 0:
        raise ConfigError("svm.C should be positive")
    if not settings['tol'] > 0:
        raise ConfigError("svm.tol should be positive")
    if settings['gamma'] not in ('scale', None) \
            and not settings['gamma'] > 0:
        raise ConfigError("svm.gamma should be 'scale' or positive")
    if settings['tune'] and len(settings['c_grid']) == 0:
        raise ConfigError("svm.c_grid should not be empty")
    return settings

def _kernel(settings):
    if settings['kernel'] == 'rbf':
        return WellClass.svm.rbf_kernel(settings['gamma'])
    return WellClass.svm.linear_kernel()

def cnn_settings(cfg):
    settings = _section(cfg, 'cnn')
    if int(settings['trials']) < 0:
        raise ConfigError("cnn.trials should be non-negative")
    if settings['activation'] not in WellClass.cnn.ACTIVATIONS:
        raise ConfigError("cnn.activation should be one of {}, got {!r}"
                          .format(sorted(WellClass.cnn.ACTIVATIONS),
                                  settings['activation']))
    WellClass.cnn.validate_train_config(_train_config(settings, 0))
    return settings

def _train_config(settings, seed):
    return WellClass.cnn.TrainConfig(
        epochs=int(settings['epochs']),
        batch_size=int(settings['batch_size']),
        learning_rate=float(settings['learning_rate']),
        weight_decay=float(settings['weight_decay']),
        seed=seed)

def monitor_config(cfg):
    return WellClass.baseline.validate_monitor_config(
        WellClass.baseline.MonitorConfig(**_section(cfg, 'baseline')))

def n_features(kind, n_channels):
    """
    Number of features of a transform over `n_channels` channels.

    """
    if kind == 'std':
        return n_channels
    return n_channels*(n_channels + 1)//2

def validate_pipeline_config(cfg):
    """
    Check a `PipelineConfig`.

    Returns
    -------
    PipelineConfig
        The same configuration.

    Raises
    ------
    ConfigError
        If any field is invalid. The message names the field.

    """
    if cfg.transform not in WellClass.transform.TRANSFORMS:
        raise ConfigError("transform should be one of {}, got {!r}".format(
            sorted(WellClass.transform.TRANSFORMS), cfg.transform))
    if cfg.method not in PIPELINE_METHODS:
        raise ConfigError("method should be one of {}, got {!r}".format(
            PIPELINE_METHODS, cfg.method))
    if cfg.noise not in WellClass.dataset.NOISE_LEVELS:
        raise ConfigError("noise should be one of {}, got {!r}".format(
            WellClass.dataset.NOISE_LEVELS, cfg.noise))
    if int(cfg.seed) < 0:
        raise ConfigError("seed should be non-negative")
    if int(cfg.n_per_class) < 1:
        raise ConfigError("n_per_class should be positive")
    if not cfg.window_seconds > 0:
        raise ConfigError("window_seconds should be positive")
    if not 0 < cfg.test_fraction < 1:
        raise ConfigError("test_fraction should be in (0, 1)")

    channels = WellClass.dataset.resolve_channels(cfg.channels)
    n_channels = len(WellClass.io.DEFAULT_CHANNELS) if channels is None \
        else len(channels)
    d = n_features(cfg.transform, n_channels)
    if cfg.pcs is not None and not 1 <= int(cfg.pcs) <= d:
        raise ConfigError("pcs should be between 1 and the {} features of "
                          "the {} transform, got {}".format(
                              d, cfg.transform, cfg.pcs))

    logreg_config(cfg)
    tree_settings(cfg)
    svm_settings(cfg)
    cnn_settings(cfg)
    monitor_config(cfg)
    return cfg

def config_to_dict(cfg):
    return WellClass.io.to_builtin(cfg._asdict())

def config_from_dict(record):
    """
    Build a `PipelineConfig` from a dictionary, e.g. a parsed JSON file.

    Raises
    ------
    ConfigError
        If `record` has fields that `PipelineConfig` does not.

    """
    unknown = sorted(set(record) - set(PipelineConfig._fields))
    if unknown:
        raise ConfigError("unknown configuration field(s) {}".format(
            unknown))
    fields = dict(record)
    if isinstance(fields.get('channels'), list):
        fields['channels'] = tuple(fields['channels'])
    return PipelineConfig(**fields)

def write_config(cfg, path):
    WellClass.io.write_json(config_to_dict(cfg), path)

def read_config(path):
    return config_from_dict(WellClass.io.read_json(path))

def config_hash(cfg):
    """
    SHA-256 digest of a configuration, independent of its output
    directory.

    """
    record = config_to_dict(cfg)
    del record['out_dir']
    text = json.dumps(record, sort_keys=True)
    return hashlib.sha256(text.encode('utf-8')).hexdigest()

def generate_about(extra_info={}):
    """
    Information about WellClass and the current analysis.

    Returns
    -------
    OrderedDict
        Keyword:value pairs with the WellClass version, date and time of
        analysis, and the contents of `extra_info`.

    """
    about = collections.OrderedDict()
    about['WellClass version'] = WellClass.__version__
    about['Date of analysis'] = time.strftime("%Y/%m/%d")
    about['Time of analysis'] = time.strftime("%I:%M:%S%p")
    for k, v in list(extra_info.items()):
        about[k] = v
    return about

###
# Pipeline
###

def load_series_set(cfg, verbose=False):
    """
    Read the series set in ``cfg.data_dir``, or generate one.

    """
    if cfg.data_dir is not None:
        if verbose:
            print("Reading series from {}...".format(cfg.data_dir))
        return WellClass.dataset.read_series_set(cfg.data_dir)
    generator_config = WellClass.dataset.make_generator_config(
        cfg.preset,
        n_series_per_class=cfg.n_per_class,
        series_len=cfg.series_len,
        noise_level=cfg.noise,
        seed=cfg.seed)
    return WellClass.dataset.generate(generator_config, verbose=verbose)

def _features_key(cfg):
    if cfg.transform == 'cov' and cfg.pcs == 4:
        return 'cov-pca4'
    return cfg.transform

def prepare_features(cfg, train_segments, test_segments, out_dir):
    """
    Transform, standardize and optionally project segments.

    Writes ``features_train.csv``, ``features_test.csv``,
    ``standardize.json`` and, with principal components, ``pca.json``.

    Returns
    -------
    train, test : FeatureMatrix

    """
    train = WellClass.transform.transform(train_segments, cfg.transform,
                                          cfg.channels)
    test = WellClass.transform.transform(test_segments, cfg.transform,
                                         cfg.channels)
    WellClass.transform.write_features(
        train, os.path.join(out_dir, 'features_train.csv'))
    WellClass.transform.write_features(
        test, os.path.join(out_dir, 'features_test.csv'))

    standardized = WellClass.dataset.standardize(train, test)
    WellClass.io.write_json({'feature_names': train.feature_names,
                             'mean': standardized.mean,
                             'std': standardized.std},
                            os.path.join(out_dir, 'standardize.json'))
    train, test = standardized.train, standardized.test
    if cfg.pcs is not None:
        if cfg.pcs > train.values.shape[1]:
            raise ConfigError("pcs {} exceeds the {} features".format(
                cfg.pcs, train.values.shape[1]))
        model = WellClass.pca.fit(train, cfg.pcs)
        WellClass.pca.save(model, os.path.join(out_dir, 'pca.json'))
        train = WellClass.pca.project(model, train)
        test = WellClass.pca.project(model, test)
    return train, test

def _segment_batch(segments, channels):
    values, labels = WellClass.dataset.stack_segments(segments, channels)
    return WellClass.cnn.Batch(values=values, labels=labels)

def build_method(name, cfg, noise_level, out_dir, train, test, history):
    """
    Assemble a `WellClass.evaluate.Method` for one classifier.

    Parameters
    ----------
    name : {'logreg', 'dtree', 'svm', 'cnn'}
    cfg : PipelineConfig
    noise_level : int
        Noise level of the data, used by the post-pruning presets.
    out_dir : str
    train, test : FeatureMatrix or Batch
        Data of the method, raw segment batches for 'cnn'.
    history : dict
        Filled with the CNN loss history.

    """
    info = {'config_hash': config_hash(cfg),
            'model_file': MODEL_FILES[name]}
    seed = int(cfg.seed)

    if name == 'logreg':
        config = logreg_config(cfg)
        info.update(config._asdict())
        fit_fxn = lambda data: WellClass.logreg.fit(data, config=config)
        predict_fxn = WellClass.logreg.predict

    elif name == 'dtree':
        settings = tree_settings(cfg)
        info.update(settings)
        key = _features_key(cfg)
        if settings['prune'] == 'pre':
            grid = WellClass.dtree.preset_grid(key, settings['criterion'])
            def fit_fxn(data):
                best_config, _ = WellClass.dtree.grid_search(
                    data,
                    criterion=settings['criterion'],
                    grid=grid,
                    k_folds=int(settings['k_folds']),
                    seed=seed,
                    n_jobs=int(settings['n_jobs']))
                return WellClass.dtree.fit(data, config=best_config)
        else:
            alpha = None
            if settings['prune'] == 'post' and settings['ccp_alpha'] is None:
                alpha = WellClass.dtree.preset_ccp_alpha(
                    key, settings['criterion'], noise_level)
                info['ccp_alpha'] = alpha
            config = _tree_config(settings, alpha)
            fit_fxn = lambda data: WellClass.dtree.fit(data, config=config)
        predict_fxn = WellClass.dtree.predict

    elif name == 'svm':
        settings = svm_settings(cfg)
        info.update(settings)
        kernel = _kernel(settings)
        def fit_fxn(data):
            C = settings['C']
            if settings['tune']:
                C = WellClass.svm.tune_C(data,
                                         kernel=kernel,
                                         c_grid=settings['c_grid'],
                                         seed=seed,
                                         tol=settings['tol']).best_C
            return WellClass.svm.fit(data, kernel=kernel, C=C,
                                     tol=settings['tol'])
        predict_fxn = WellClass.svm.predict

    elif name == 'cnn':
        settings = cnn_settings(cfg)
        info.update(settings)
        shape = np.asarray(train.values).shape
        cnn_config = WellClass.cnn.CnnConfig(in_channels=shape[1],
                                             input_length=shape[2],
                                             activation=settings['activation'],
                                             seed=seed)
        WellClass.cnn.validate_config(cnn_config)
        def fit_fxn(data):
            if int(settings['trials']) > 0:
                output = WellClass.cnn.random_search(
                    WellClass.cnn.SearchSpace(
                        n_trials=int(settings['trials'])),
                    data,
                    test,
                    cnn_config=cnn_config,
                    epochs=int(settings['epochs']),
                    seed=seed,
                    n_jobs=int(settings['n_jobs']),
                    log_path=os.path.join(out_dir, 'cnn_trials.jsonl'))
                return output.best_model
            output = WellClass.cnn.train(WellClass.cnn.init_model(cnn_config),
                                         data,
                                         _train_config(settings, seed),
                                         test_data=test)
            history['train_mse'] = output.train_mse
            history['test_mse'] = output.test_mse
            return output.model
        predict_fxn = WellClass.cnn.predict

    else:
        raise ConfigError("unknown method {!r}".format(name))

    return WellClass.evaluate.Method(name=name,
                                     fit_fxn=fit_fxn,
                                     predict_fxn=predict_fxn,
                                     config=info,
                                     train=train,
                                     test=test)

def save_model(name, model, out_dir):
    path = os.path.join(out_dir, MODEL_FILES[name])
    if name == 'logreg':
        WellClass.logreg.save(model, path)
    elif name == 'dtree':
        WellClass.dtree.save(model, path)
    elif name == 'svm':
        WellClass.svm.save(model, path)
    elif name == 'cnn':
        WellClass.cnn.save(model, path)

def load_model(name, run_dir):
    path = os.path.join(run_dir, MODEL_FILES[name])
    if name == 'logreg':
        return WellClass.logreg.load(path)
    elif name == 'dtree':
        return WellClass.dtree.load(path)
    elif name == 'svm':
        return WellClass.svm.load(path)
    elif name == 'cnn':
        return WellClass.cnn.load(path)
    raise ConfigError("unknown method {!r}".format(name))

PREDICT_FXNS = {'logreg': WellClass.logreg.predict,
                'dtree': WellClass.dtree.predict,
                'svm': WellClass.svm.predict,
                'cnn': WellClass.cnn.predict}

def _run_baseline(cfg, series_set, chash, verbose):
    config = monitor_config(cfg)
    if verbose:
        print("Fitting regression lines of {} on {}...".format(
            config.y_channel, config.x_channel))
    clouds = WellClass.baseline.line_clouds(series_set, config)
    clouds.to_csv(os.path.join(cfg.out_dir, 'lines.csv'), index=False)

    rows = []
    for label, group in clouds.groupby('label'):
        lines = [WellClass.baseline.RegressionLine(
                     intercept=r.intercept,
                     incline=r.incline,
                     window_start_index=r.window_start)
                 for r in group.itertuples()]
        dist = WellClass.baseline.line_distribution(lines)
        rows.append([int(label), dist.n_lines,
                     dist.mean[0], dist.std[0], dist.median[0], dist.iqr[0],
                     dist.mean[1], dist.std[1], dist.median[1], dist.iqr[1]])
    table = pd.DataFrame(rows, columns=['label', 'n_lines',
                                        'intercept_mean', 'intercept_std',
                                        'intercept_median', 'intercept_iqr',
                                        'incline_mean', 'incline_std',
                                        'incline_median', 'incline_iqr'])
    table.to_csv(os.path.join(cfg.out_dir, 'baseline_summary.csv'),
                 index=False)
    WellClass.io.write_json(generate_about({'config_hash': chash}),
                            os.path.join(cfg.out_dir, 'about.json'))
    return PipelineOutput(table=table, reports=[], config_hash=chash,
                          out_dir=cfg.out_dir)

def run_pipeline(cfg, verbose=False):
    """
    Run the classification pipeline.

    This function performs the following:

     1. Validate the configuration and write it to ``config.json``.
     2. Read the series set in ``cfg.data_dir``, or generate one.
     3. Window the series and split the segments by label.
     4. Transform and standardize the segments, and project them onto
        ``cfg.pcs`` principal components if requested.
     5. Train and evaluate the requested methods on the same split.
     6. Save every model, the comparison report (CSV, aligned text and
        optionally Excel) and ``about.json``.

    With ``cfg.method == 'baseline'``, regression lines are computed for
    every series instead, and their per-class summary is reported.

    Parameters
    ----------
    cfg : PipelineConfig
    verbose : bool, optional
        Whether to print information messages during the execution of this
        function.

    Returns
    -------
    table : DataFrame
        Comparison table, or per-class line summary for the baseline.
    reports : list of MethodReport
    config_hash : str
    out_dir : str

    Raises
    ------
    ConfigError, DataError, TrainingError
        Artifacts written before the failure are kept.

    """
    validate_pipeline_config(cfg)
    if not os.path.exists(cfg.out_dir):
        os.makedirs(cfg.out_dir)
    chash = config_hash(cfg)
    write_config(cfg, os.path.join(cfg.out_dir, 'config.json'))

    series_set = load_series_set(cfg, verbose=verbose)
    if cfg.method == 'baseline':
        return _run_baseline(cfg, series_set, chash, verbose)

    if verbose:
        print("Windowing {} series...".format(len(series_set.items)))
    segments = WellClass.dataset.window(series_set, cfg.window_seconds)
    train_segments, test_segments = WellClass.dataset.split(
        segments, cfg.test_fraction, cfg.seed)

    names = METHODS if cfg.method == 'all' else (cfg.method,)
    feature_data = None
    if any(name != 'cnn' for name in names):
        if verbose:
            print("Transforming segments ({})...".format(cfg.transform))
        feature_data = prepare_features(cfg, train_segments, test_segments,
                                        cfg.out_dir)
    history = {}
    methods = []
    for name in names:
        if name == 'cnn':
            data = (_segment_batch(train_segments, cfg.channels),
                    _segment_batch(test_segments, cfg.channels))
        else:
            data = feature_data
        methods.append(build_method(name, cfg, series_set.noise_level,
                                    cfg.out_dir, data[0], data[1], history))

    output = WellClass.evaluate.compare(methods, verbose=verbose)
    for report in output.reports:
        save_model(report.method, report.model, cfg.out_dir)
        if report.method == 'cnn':
            test_batch = methods[names.index('cnn')].test
            embedding = WellClass.cnn.embed(report.model, test_batch.values)
            table = pd.DataFrame(
                embedding,
                columns=['x{}'.format(i + 1)
                         for i in range(embedding.shape[1])])
            table['label'] = test_batch.labels
            table.to_csv(os.path.join(cfg.out_dir, 'embedding_test.csv'),
                         index=False)
    if history:
        pd.DataFrame({'epoch': np.arange(1, len(history['train_mse']) + 1),
                      'train_mse': history['train_mse'],
                      'test_mse': history['test_mse']}).to_csv(
            os.path.join(cfg.out_dir, 'cnn_history.csv'), index=False)

    WellClass.evaluate.write_report(
        output.table,
        os.path.join(cfg.out_dir, 'report.csv'),
        os.path.join(cfg.out_dir, 'report.xlsx') if cfg.xlsx else None)
    with open(os.path.join(cfg.out_dir, 'report.txt'), 'w') as f:
        f.write(WellClass.evaluate.format_table(output.table))
        f.write('\n')
    WellClass.io.write_json(
        generate_about({'config_hash': chash,
                        'models': {name: MODEL_FILES[name]
                                   for name in names}}),
        os.path.join(cfg.out_dir, 'about.json'))
    if verbose:
        print("")
        print(WellClass.evaluate.format_table(output.table))
    return PipelineOutput(table=output.table,
                          reports=output.reports,
                          config_hash=chash,
                          out_dir=cfg.out_dir)

def evaluate_run(run_dir, data_dir, out_dir, verbose=False):
    """
    Apply the models of a finished run to every segment of a series set.

    The run's standardization statistics and principal components are
    reused, so that no statistic is computed on the new data.

    Returns
    -------
    DataFrame
        Comparison table, also written to ``<out_dir>/evaluation.csv``.

    """
    cfg = read_config(os.path.join(run_dir, 'config.json'))
    if cfg.method == 'baseline':
        raise ConfigError("run {} has no classifier to evaluate".format(
            run_dir))
    if not os.path.exists(out_dir):
        os.makedirs(out_dir)
    series_set = WellClass.dataset.read_series_set(data_dir)
    segments = WellClass.dataset.window(series_set, cfg.window_seconds)
    names = METHODS if cfg.method == 'all' else (cfg.method,)

    features = None
    if any(name != 'cnn' for name in names):
        features = WellClass.transform.transform(segments, cfg.transform,
                                                 cfg.channels)
        stats = WellClass.io.read_json(os.path.join(run_dir,
                                                    'standardize.json'))
        values = (features.values - np.array(stats['mean'])) \
            / np.array(stats['std'])
        features = features._replace(values=values)
        pca_path = os.path.join(run_dir, 'pca.json')
        if os.path.exists(pca_path):
            features = WellClass.pca.project(WellClass.pca.load(pca_path),
                                             features)
    reports = []
    for name in names:
        if verbose:
            print("Evaluating {}...".format(name))
        data = _segment_batch(segments, cfg.channels) if name == 'cnn' \
            else features
        reports.append(WellClass.evaluate.evaluate(
            load_model(name, run_dir),
            PREDICT_FXNS[name],
            data,
            method=name,
            config={'config_hash': config_hash(cfg),
                    'model_file': MODEL_FILES[name]}))
    table = WellClass.evaluate.report_table(reports)
    WellClass.evaluate.write_report(table,
                                    os.path.join(out_dir, 'evaluation.csv'))
    return table

def sweep(cfg, pcs_list, noise_list, verbose=False):
    """
    Run the pipeline for every combination of noise level and number of
    principal components.

    Each run writes to ``<out_dir>/noise<N>_pcs<D>``.

    Returns
    -------
    DataFrame
        Long table with columns ``method``, ``noise``, ``pcs`` and
        ``accuracy``, also written to ``<out_dir>/sweep.csv``.

    """
    if cfg.data_dir is not None and len(noise_list) > 1:
        raise ConfigError("noise sweep requires generated data, not "
                          "data_dir")
    rows = []
    for noise in noise_list:
        for pcs in pcs_list:
            run_cfg = cfg._replace(
                noise=noise,
                pcs=pcs,
                out_dir=os.path.join(cfg.out_dir, 'noise{}_pcs{}'.format(
                    noise, 0 if pcs is None else pcs)))
            if verbose:
                print("Running noise {}, {} PCs...".format(noise, pcs))
            output = run_pipeline(run_cfg)
            for report in output.reports:
                rows.append([report.method, noise,
                             0 if pcs is None else pcs, report.accuracy])
    table = pd.DataFrame(rows, columns=['method', 'noise', 'pcs',
                                        'accuracy'])
    table.to_csv(os.path.join(cfg.out_dir, 'sweep.csv'), index=False)
    return table

###
# Plot bundles
###

def emit_feature_pairs(features, out_dir):
    """
    Write one CSV per pair of features and one per feature.

    Pair files ``pair_II_JJ.csv`` hold the two feature columns and the
    label, marginal files ``marginal_II.csv`` one feature column and the
    label. D features give D(D-1)/2 pair files and D marginal files.

    Returns
    -------
    list of str
        Paths of the written files.

    Raises
    ------
    DataError
        If `features` has no rows.

    """
    values = np.asarray(features.values)
    if values.ndim != 2 or values.shape[0] == 0:
        raise DataError("no features to emit")
    names = list(features.feature_names)
    labels = np.asarray(features.labels, dtype=int)
    paths = []
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            table = pd.DataFrame({names[i]: values[:, i],
                                  names[j]: values[:, j],
                                  'label': labels},
                                 columns=[names[i], names[j], 'label'])
            path = os.path.join(out_dir, 'pair_{:02d}_{:02d}.csv'.format(
                i + 1, j + 1))
            table.to_csv(path, index=False)
            paths.append(path)
    for i, name in enumerate(names):
        table = pd.DataFrame({name: values[:, i], 'label': labels},
                             columns=[name, 'label'])
        path = os.path.join(out_dir, 'marginal_{:02d}.csv'.format(i + 1))
        table.to_csv(path, index=False)
        paths.append(path)
    return paths

def emit_pca(model, out_dir):
    """
    Write the explained variance ratio of every retained component.

    """
    ratio = WellClass.pca.explained_variance_ratio(model)[:model.d]
    cumulative = WellClass.pca.cumulative_explained_variance_ratio(
        model)[:model.d]
    table = pd.DataFrame({'component': np.arange(1, model.d + 1),
                          'ratio': ratio,
                          'cumulative': cumulative},
                         columns=['component', 'ratio', 'cumulative'])
    path = os.path.join(out_dir, 'pca_explained.csv')
    table.to_csv(path, index=False)
    return path

def emit_embedding(embedding, labels, out_dir):
    embedding = np.asarray(embedding, dtype=np.float64)
    if embedding.ndim != 2 or embedding.shape[0] == 0:
        raise DataError("no embedding to emit")
    table = pd.DataFrame(embedding,
                         columns=['x{}'.format(i + 1)
                                  for i in range(embedding.shape[1])])
    table['label'] = np.asarray(labels, dtype=int)
    path = os.path.join(out_dir, 'embedding.csv')
    table.to_csv(path, index=False)
    return path

def emit_line_cloud(clouds, out_dir):
    if len(clouds) == 0:
        raise DataError("no regression lines to emit")
    path = os.path.join(out_dir, 'baseline_cloud.csv')
    clouds[['intercept', 'incline', 'label']].to_csv(path, index=False)
    return path

def emit_plots(run_dir, out_dir, png=False, verbose=False):
    """
    Write CSV bundles for external plotting from the artifacts of a run.

    Parameters
    ----------
    run_dir : str
        Output directory of `run_pipeline`.
    out_dir : str
        Directory for the bundles.
    png : bool, optional
        Whether to also render the bundles with `WellClass.plot`.
    verbose : bool, optional

    Returns
    -------
    list of str
        Paths of the written files.

    Raises
    ------
    DataError
        If the run has no artifacts to plot.

    """
    if not os.path.exists(out_dir):
        os.makedirs(out_dir)
    if png:
        import matplotlib
        matplotlib.use('Agg')
        import matplotlib.pyplot as plt
        __import__('WellClass.plot')

    paths = []
    features_path = os.path.join(run_dir, 'features_train.csv')
    if os.path.exists(features_path):
        features = WellClass.transform.read_features(features_path)
        paths += emit_feature_pairs(features, out_dir)
        if png:
            WellClass.plot.feature_pairs(
                features.values, features.labels,
                feature_names=features.feature_names,
                savefig=os.path.join(out_dir, 'feature_pairs.png'))

    pca_path = os.path.join(run_dir, 'pca.json')
    if os.path.exists(pca_path):
        model = WellClass.pca.load(pca_path)
        paths.append(emit_pca(model, out_dir))
        if png:
            plt.figure()
            WellClass.plot.explained_variance(
                WellClass.pca.explained_variance_ratio(model)[:model.d],
                savefig=os.path.join(out_dir, 'pca_explained.png'))

    embedding_path = os.path.join(run_dir, 'embedding_test.csv')
    if os.path.exists(embedding_path):
        table = pd.read_csv(embedding_path)
        embedding = table.drop(columns='label').values
        paths.append(emit_embedding(embedding, table['label'].values,
                                    out_dir))
        if png and embedding.shape[1] == 2:
            plt.figure()
            WellClass.plot.scatter2d(
                embedding, table['label'].values, xlabel='x1',
                ylabel='x2', savefig=os.path.join(out_dir, 'embedding.png'))

    history_path = os.path.join(run_dir, 'cnn_history.csv')
    if png and os.path.exists(history_path):
        table = pd.read_csv(history_path)
        plt.figure()
        WellClass.plot.training_curve(
            table['train_mse'].values, table['test_mse'].values,
            savefig=os.path.join(out_dir, 'cnn_history.png'))

    lines_path = os.path.join(run_dir, 'lines.csv')
    if os.path.exists(lines_path):
        clouds = pd.read_csv(lines_path)
        paths.append(emit_line_cloud(clouds, out_dir))
        if png:
            plt.figure()
            WellClass.plot.scatter2d(
                clouds[['intercept', 'incline']].values,
                clouds['label'].values,
                xlabel='Intercept', ylabel='Incline',
                savefig=os.path.join(out_dir, 'baseline_cloud.png'))

    if not paths:
        raise DataError("no plottable artifacts in {}".format(run_dir))
    if verbose:
        print("Wrote {} files to {}.".format(len(paths), out_dir))
    return paths

###
# Command line
###

# Command line flags overriding top-level configuration fields
PIPELINE_FLAGS = [('transform', 'transform'),
                  ('pcs', 'pcs'),
                  ('noise', 'noise'),
                  ('seed', 'seed'),
                  ('preset', 'preset'),
                  ('n_per_class', 'n_per_class'),
                  ('len', 'series_len'),
                  ('window', 'window_seconds'),
                  ('test_fraction', 'test_fraction'),
                  ('channels', 'channels'),
                  ('inputpath', 'data_dir'),
                  ('outputpath', 'out_dir'),
                  ('xlsx', 'xlsx')]

# Command line flags overriding method section fields
SECTION_FLAGS = {
    'logreg': [('reg_strength', 'reg_strength'),
               ('optimizer', 'optimizer'),
               ('max_iter', 'max_iter')],
    'dtree': [('criterion', 'criterion'),
              ('prune', 'prune'),
              ('ccp_alpha', 'ccp_alpha'),
              ('max_depth', 'max_depth'),
              ('min_samples_leaf', 'min_samples_leaf'),
              ('n_jobs', 'n_jobs')],
    'svm': [('kernel', 'kernel'),
            ('C', 'C'),
            ('gamma', 'gamma'),
            ('tol', 'tol'),
            ('tune', 'tune')],
    'cnn': [('trials', 'trials'),
            ('epochs', 'epochs'),
            ('batch_size', 'batch_size'),
            ('lr', 'learning_rate'),
            ('weight_decay', 'weight_decay'),
            ('activation', 'activation'),
            ('n_jobs', 'n_jobs')],
}

def _pcs_arg(text):
    if text.lower() == 'none':
        return 0
    return int(text)

def _gamma_arg(text):
    if text == 'scale':
        return text
    return float(text)

def _int_list(text):
    return [int(v) for v in text.split(',') if v]

def config_from_args(args, method):
    """
    Build a `PipelineConfig` from a configuration file and command line
    flags. Flags override the file values.

    """
    if getattr(args, 'config', None):
        record = config_to_dict(read_config(args.config))
    else:
        record = config_to_dict(PipelineConfig())
    for flag, field in PIPELINE_FLAGS:
        value = getattr(args, flag, None)
        if value is not None and value is not False:
            record[field] = value
    if record['pcs'] == 0:
        record['pcs'] = None
    for name, flags in SECTION_FLAGS.items():
        section = dict(record.get(name) or {})
        for flag, field in flags:
            value = getattr(args, name + '_' + flag, None)
            if value is not None and value is not False:
                section[field] = value
        record[name] = section or record.get(name)
    record['method'] = method
    return config_from_dict(record)

def _add_pipeline_arguments(parser):
    parser.add_argument(
        "--config",
        type=str,
        help="JSON pipeline configuration. Flags override its values")
    parser.add_argument(
        "-i",
        "--in",
        dest="inputpath",
        type=str,
        help="series set directory. If not specified, generate data")
    parser.add_argument(
        "-o",
        "--out",
        dest="outputpath",
        type=str,
        help="output directory")
    parser.add_argument(
        "--transform",
        choices=sorted(WellClass.transform.TRANSFORMS),
        help="segment transform")
    parser.add_argument(
        "--pcs",
        type=_pcs_arg,
        help="number of principal components, or 'none'")
    parser.add_argument(
        "--noise",
        type=int,
        choices=WellClass.dataset.NOISE_LEVELS,
        help="noise level of generated data")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument(
        "--preset",
        choices=sorted(WellClass.dataset.PRESETS),
        help="housing preset of generated data")
    parser.add_argument(
        "--n-per-class",
        type=int,
        help="generated series per class")
    parser.add_argument(
        "--len",
        type=int,
        help="samples per generated series")
    parser.add_argument(
        "--window",
        type=float,
        help="segment length in seconds")
    parser.add_argument(
        "--test-fraction",
        type=float,
        help="fraction of segments in the test set")
    parser.add_argument(
        "--channels",
        type=str,
        help="channel selection: 'all', 'x' or 'y'")
    parser.add_argument(
        "--xlsx",
        action="store_true",
        help="also write the report as an Excel workbook")
    parser.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        help="print information about individual processing steps")

def _add_method_arguments(parser, name):
    if name == 'logreg':
        parser.add_argument("--reg-strength", dest="logreg_reg_strength",
                            type=float, help="L2 penalty lambda")
        parser.add_argument("--optimizer", dest="logreg_optimizer",
                            choices=WellClass.logreg.OPTIMIZERS)
        parser.add_argument("--max-iter", dest="logreg_max_iter", type=int)
    elif name == 'dtree':
        parser.add_argument("--criterion", dest="dtree_criterion",
                            choices=WellClass.dtree.CRITERIA)
        parser.add_argument("--prune", dest="dtree_prune",
                            choices=PRUNE_MODES,
                            help="'pre' grid searches depth and leaf sizes, "
                                 "'post' applies cost-complexity pruning")
        parser.add_argument("--ccp-alpha", dest="dtree_ccp_alpha",
                            type=float)
        parser.add_argument("--max-depth", dest="dtree_max_depth", type=int)
        parser.add_argument("--min-samples-leaf",
                            dest="dtree_min_samples_leaf", type=int)
        parser.add_argument("--tree-jobs", dest="dtree_n_jobs", type=int)
    elif name == 'svm':
        parser.add_argument("--kernel", dest="svm_kernel",
                            choices=WellClass.svm.KERNELS)
        parser.add_argument("--C", dest="svm_C", type=float)
        parser.add_argument("--gamma", dest="svm_gamma", type=_gamma_arg)
        parser.add_argument("--svm-tol", dest="svm_tol", type=float)
        parser.add_argument("--tune", dest="svm_tune", action="store_true",
                            help="select C by cross validation")
    elif name == 'cnn':
        parser.add_argument("--trials", dest="cnn_trials", type=int,
                            help="random search trials, 0 to train once")
        parser.add_argument("--epochs", dest="cnn_epochs", type=int)
        parser.add_argument("--batch-size", dest="cnn_batch_size", type=int)
        parser.add_argument("--lr", dest="cnn_lr", type=float)
        parser.add_argument("--weight-decay", dest="cnn_weight_decay",
                            type=float)
        parser.add_argument("--activation", dest="cnn_activation",
                            choices=sorted(WellClass.cnn.ACTIVATIONS))
        parser.add_argument("--cnn-jobs", dest="cnn_n_jobs", type=int)

def _cmd_generate(args):
    config = WellClass.dataset.make_generator_config(
        args.preset,
        n_series_per_class=args.n_per_class,
        series_len=args.len,
        noise_level=args.noise,
        seed=args.seed)
    series_set = WellClass.dataset.generate(config, n_jobs=args.n_jobs,
                                            verbose=args.verbose)
    WellClass.dataset.write_series_set(series_set, args.out)

def _cmd_transform(args):
    series_set = WellClass.dataset.read_series_set(args.inputpath)
    segments = WellClass.dataset.window(series_set, args.window)
    features = WellClass.transform.transform(segments, args.transform,
                                             args.channels)
    if not os.path.exists(args.outputpath):
        os.makedirs(args.outputpath)
    WellClass.transform.write_features(
        features, os.path.join(args.outputpath, 'features.csv'))

def _cmd_pca(args):
    features = WellClass.transform.read_features(args.inputpath)
    if not 1 <= args.pcs <= features.values.shape[1]:
        raise ConfigError("pcs should be between 1 and {}, got {}".format(
            features.values.shape[1], args.pcs))
    model = WellClass.pca.fit(features, args.pcs)
    if not os.path.exists(args.outputpath):
        os.makedirs(args.outputpath)
    WellClass.pca.save(model, os.path.join(args.outputpath, 'pca.json'))
    WellClass.transform.write_features(
        WellClass.pca.project(model, features),
        os.path.join(args.outputpath, 'projected.csv'))
    emit_pca(model, args.outputpath)

def _cmd_baseline(args):
    config = WellClass.baseline.validate_monitor_config(
        WellClass.baseline.MonitorConfig(x_channel=args.x,
                                         y_channel=args.y,
                                         window_minutes=args.window,
                                         step_minutes=args.step))
    if os.path.isdir(args.inputpath):
        series_set = WellClass.dataset.read_series_set(args.inputpath)
        WellClass.baseline.line_clouds(series_set, config).to_csv(
            args.outputpath, index=False)
    else:
        series = WellClass.io.read_series(args.inputpath)
        WellClass.baseline.write_lines(
            WellClass.baseline.monitor(series, config), args.outputpath)

def _cmd_pipeline(args):
    cfg = config_from_args(args, args.method)
    run_pipeline(cfg, verbose=args.verbose)

def _cmd_evaluate(args):
    table = evaluate_run(args.run, args.inputpath, args.outputpath,
                         verbose=args.verbose)
    print(WellClass.evaluate.format_table(table))

def _cmd_emit_plots(args):
    emit_plots(args.run, args.outputpath, png=args.png,
               verbose=args.verbose)

def _cmd_sweep(args):
    cfg = config_from_args(args, args.method)
    pcs_list = [p or None for p in args.pcs_list]
    table = sweep(cfg, pcs_list, args.noise_list, verbose=args.verbose)
    print(table.pivot_table(index=['method', 'noise'], columns='pcs',
                            values='accuracy').to_string())

def build_parser():
    parser = argparse.ArgumentParser(
        prog='wellclass',
        description="classify wellhead sensor series as intact or broken.")
    parser.add_argument('--version', action='version',
                        version=WellClass.__version__)
    subparsers = parser.add_subparsers(dest='command')
    subparsers.required = True

    p = subparsers.add_parser('generate', help="write a surrogate series set")
    p.add_argument("--n-per-class", type=int, default=20)
    p.add_argument("--len", type=int, default=18001)
    p.add_argument("--noise", type=int, default=1,
                   choices=WellClass.dataset.NOISE_LEVELS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--preset", default='slack',
                   choices=sorted(WellClass.dataset.PRESETS))
    p.add_argument("--n-jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=_cmd_generate)

    p = subparsers.add_parser('transform', help="segment features")
    p.add_argument("-i", "--in", dest="inputpath", required=True,
                   help="series set directory")
    p.add_argument("-o", "--out", dest="outputpath", required=True,
                   help="output directory")
    p.add_argument("--transform", default='std',
                   choices=sorted(WellClass.transform.TRANSFORMS))
    p.add_argument("--window", type=float, default=60.)
    p.add_argument("--channels", default='all')
    p.set_defaults(func=_cmd_transform)

    p = subparsers.add_parser('pca', help="principal components")
    p.add_argument("-i", "--in", dest="inputpath", required=True,
                   help="feature CSV file")
    p.add_argument("-o", "--out", dest="outputpath", required=True,
                   help="output directory")
    p.add_argument("--pcs", type=int, required=True)
    p.set_defaults(func=_cmd_pca)

    p = subparsers.add_parser('baseline', help="regression lines")
    p.add_argument("--x", default='accx_FJ', help="regressor channel")
    p.add_argument("--y", default='bmx', help="response channel")
    p.add_argument("--window", type=int, default=10,
                   help="window length in minutes")
    p.add_argument("--step", type=int, default=1,
                   help="window step in minutes")
    p.add_argument("-i", "--in", dest="inputpath", required=True,
                   help="series CSV file or series set directory")
    p.add_argument("-o", "--out", dest="outputpath", required=True,
                   help="output CSV file")
    p.set_defaults(func=_cmd_baseline)

    p = subparsers.add_parser('train', help="train one classifier")
    train_subparsers = p.add_subparsers(dest='method')
    train_subparsers.required = True
    for name in METHODS:
        q = train_subparsers.add_parser(name)
        _add_pipeline_arguments(q)
        _add_method_arguments(q, name)
        q.set_defaults(func=_cmd_pipeline)

    p = subparsers.add_parser('compare', help="train all classifiers")
    _add_pipeline_arguments(p)
    for name in METHODS:
        _add_method_arguments(p, name)
    p.set_defaults(func=_cmd_pipeline, method='all')

    p = subparsers.add_parser('evaluate', help="apply a trained run")
    p.add_argument("--run", required=True, help="run directory")
    p.add_argument("-i", "--in", dest="inputpath", required=True,
                   help="series set directory")
    p.add_argument("-o", "--out", dest="outputpath", required=True,
                   help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=_cmd_evaluate)

    p = subparsers.add_parser('emit-plots', help="plot bundles of a run")
    p.add_argument("--run", required=True, help="run directory")
    p.add_argument("-o", "--out", dest="outputpath", required=True,
                   help="output directory")
    p.add_argument("--png", action="store_true",
                   help="also render PNG figures")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=_cmd_emit_plots)

    p = subparsers.add_parser('sweep',
                              help="accuracy per noise level and PCs")
    _add_pipeline_arguments(p)
    p.add_argument("--method", default='logreg', choices=METHODS + ('all',))
    p.add_argument("--pcs-list", type=_int_list, default=[2, 3, 4, 5, 6],
                   help="comma separated numbers of PCs, 0 for none")
    p.add_argument("--noise-list", type=_int_list, default=[1, 10, 50],
                   help="comma separated noise levels")
    for name in METHODS:
        _add_method_arguments(p, name)
    p.set_defaults(func=_cmd_sweep)
    return parser

EXIT_CODES = ((ConfigError, 2), (DataError, 3), (TrainingError, 4))

def main(argv=None):
    """
    Entry point of the ``wellclass`` command.

    Returns
    -------
    int
        Process exit code.

    """
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ConfigError, DataError, TrainingError) as e:
        print("error: {}".format(e), file=sys.stderr)
        for error_class, code in EXIT_CODES:
            if isinstance(e, error_class):
                return code
    return 0

if __name__ == '__main__':
    sys.exit(main())
