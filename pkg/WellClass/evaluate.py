"""
Classification metrics and method comparison.

The broken state (label 1) is the positive class throughout, so that a
true positive is a broken well recognized as broken.

"""

import collections
import json
import time

import numpy as np
import pandas as pd
import sklearn.model_selection

import WellClass.io
from WellClass.errors import ConfigError, DataError

ConfusionMatrix = collections.namedtuple(
    'ConfusionMatrix',
    ['tp', 'fp', 'fn', 'tn'])

Metrics = collections.namedtuple(
    'Metrics',
    ['precision', 'recall', 'f1', 'degenerate'])

MethodReport = collections.namedtuple(
    'MethodReport',
    ['method', 'precision', 'recall', 'f1', 'accuracy', 'train_ms',
     'test_ms', 'config', 'confusion', 'degenerate', 'model'])

Method = collections.namedtuple(
    'Method',
    ['name', 'fit_fxn', 'predict_fxn', 'config', 'train', 'test'],
    defaults=[None, None, None])

REPORT_COLUMNS = ['method', 'precision', 'recall', 'f1', 'accuracy',
                  'train_ms', 'test_ms', 'config']

def _labels(x):
    labels = np.asarray(getattr(x, 'labels', x))
    return labels.astype(int).ravel()

def _check_lengths(pred, truth):
    pred = _labels(pred)
    truth = _labels(truth)
    if pred.size != truth.size:
        raise DataError("predictions ({}) and truth ({}) should have the "
                        "same length".format(pred.size, truth.size))
    if pred.size < 1:
        raise DataError("at least one prediction required")
    return pred, truth

def confusion(pred, truth, positive=1):
    """
    Confusion matrix of binary predictions.

    Parameters
    ----------
    pred, truth : array_like
        Predicted and true labels in {0, 1}.
    positive : {0, 1}, optional
        Label of the positive class. Default 1 (broken).

    Returns
    -------
    ConfusionMatrix

    Raises
    ------
    DataError
        If the lengths differ or are zero.

    """
    pred, truth = _check_lengths(pred, truth)
    pred_pos = pred == positive
    truth_pos = truth == positive
    return ConfusionMatrix(tp=int(np.sum(pred_pos & truth_pos)),
                           fp=int(np.sum(pred_pos & ~truth_pos)),
                           fn=int(np.sum(~pred_pos & truth_pos)),
                           tn=int(np.sum(~pred_pos & ~truth_pos)))

def precision_recall_f1(cm):
    """
    Precision, recall and F1 score of a confusion matrix.

    ``precision = tp/(tp+fp)``, ``recall = tp/(tp+fn)`` and F1 is their
    harmonic mean. A metric whose denominator is zero is set to 0 and its
    name is listed in ``degenerate``.

    Returns
    -------
    Metrics
        Namedtuple ``(precision, recall, f1, degenerate)``, where
        ``degenerate`` is a tuple of metric names.

    """
    degenerate = []
    if cm.tp + cm.fp > 0:
        precision = cm.tp / float(cm.tp + cm.fp)
    else:
        precision = 0.
        degenerate.append('precision')
    if cm.tp + cm.fn > 0:
        recall = cm.tp / float(cm.tp + cm.fn)
    else:
        recall = 0.
        degenerate.append('recall')
    if precision + recall > 0:
        f1 = 2.*precision*recall / (precision + recall)
    else:
        f1 = 0.
        degenerate.append('f1')
    return Metrics(precision=precision,
                   recall=recall,
                   f1=f1,
                   degenerate=tuple(degenerate))

def accuracy(pred, truth):
    """
    Fraction of correctly predicted labels.

    """
    pred, truth = _check_lengths(pred, truth)
    return float(np.mean(pred == truth))

###
# Cross validation
###

def cross_val_accuracy(fit_fxn, predict_fxn, X, y, k_folds=5, seed=0,
                       full_output=False):
    """
    Stratified k-fold cross-validated accuracy.

    Parameters
    ----------
    fit_fxn : function
        ``model = fit_fxn(X_train, y_train)``.
    predict_fxn : function
        ``labels = predict_fxn(model, X_val)``.
    X : array_like
        NxD features.
    y : array_like
        Labels in {0, 1}.
    k_folds : int, optional
        Number of folds, at least 2.
    seed : int, optional
        Seed of the fold shuffle.
    full_output : bool, optional
        Flag specifying to return the per-fold accuracies as well.

    Returns
    -------
    mean_accuracy : float
    fold_accuracy : numpy array, only if ``full_output==True``

    Raises
    ------
    ConfigError
        If `k_folds` is smaller than 2.
    DataError
        If a class has fewer than `k_folds` samples, so that some fold
        would lack it.

    """
    if k_folds < 2:
        raise ConfigError("k_folds should be at least 2")
    X = np.asarray(X, dtype=np.float64)
    y = _labels(y)
    counts = np.bincount(y, minlength=2)
    if counts.min() < k_folds:
        raise DataError("each class needs at least {} samples for {}-fold "
                        "cross validation, got {}".format(
                            k_folds, k_folds, counts.tolist()))

    folds = sklearn.model_selection.StratifiedKFold(n_splits=k_folds,
                                                    shuffle=True,
                                                    random_state=seed)
    scores = []
    for train_idx, val_idx in folds.split(X, y):
        model = fit_fxn(X[train_idx], y[train_idx])
        scores.append(accuracy(predict_fxn(model, X[val_idx]), y[val_idx]))
    scores = np.array(scores)

    if full_output:
        CrossValOutput = collections.namedtuple(
            'CrossValOutput',
            ['mean_accuracy', 'fold_accuracy'])
        return CrossValOutput(mean_accuracy=float(np.mean(scores)),
                              fold_accuracy=scores)
    else:
        return float(np.mean(scores))

###
# Method comparison
###

def evaluate(model, predict_fxn, test, method='model', config=None,
             train_ms=float('nan'), test_repeats=3):
    """
    Evaluate a trained model on a test set.

    The test time is the minimum over `test_repeats` timed predictions.

    Returns
    -------
    MethodReport

    """
    test_times = []
    for _ in range(test_repeats):
        t0 = time.perf_counter()
        pred = predict_fxn(model, test)
        test_times.append(1000.*(time.perf_counter() - t0))
    truth = _labels(test)
    cm = confusion(pred, truth)
    metrics = precision_recall_f1(cm)
    return MethodReport(method=method,
                        precision=metrics.precision,
                        recall=metrics.recall,
                        f1=metrics.f1,
                        accuracy=accuracy(pred, truth),
                        train_ms=train_ms,
                        test_ms=min(test_times),
                        config=config if config is not None else {},
                        confusion=cm,
                        degenerate=metrics.degenerate,
                        model=model)

def compare(methods, train=None, test=None, verbose=False):
    """
    Train and evaluate several methods on the same split.

    Parameters
    ----------
    methods : list of Method
        Methods to compare. Each is trained with ``fit_fxn(train)`` and
        evaluated with ``predict_fxn(model, test)``. A method's own
        ``train``/``test`` fields, if set, replace the shared ones; this
        lets methods consume different views of the same split (features
        versus raw segments).
    train, test : FeatureMatrix or similar, optional
        Shared training and test data. Objects with a ``labels`` attribute.
    verbose : bool, optional
        Flag specifying whether to print progress.

    Returns
    -------
    reports : list of MethodReport
    table : DataFrame
        Comparison table with `REPORT_COLUMNS`.

    Raises
    ------
    ConfigError
        If a method has no fit function (untrained pipeline) or no data.

    """
    if len(methods) == 0:
        raise ConfigError("no methods to compare")
    reports = []
    for method in methods:
        if method.fit_fxn is None or method.predict_fxn is None:
            raise ConfigError("method {!r} has no fit or predict function"
                              .format(method.name))
        method_train = method.train if method.train is not None else train
        method_test = method.test if method.test is not None else test
        if method_train is None or method_test is None:
            raise ConfigError("method {!r} has no training or test data"
                              .format(method.name))
        if verbose:
            print("Training {}...".format(method.name))
        t0 = time.perf_counter()
        model = method.fit_fxn(method_train)
        train_ms = 1000.*(time.perf_counter() - t0)
        reports.append(evaluate(model,
                                method.predict_fxn,
                                method_test,
                                method=method.name,
                                config=method.config,
                                train_ms=train_ms))
        if verbose:
            print("{}: accuracy {:.4f}".format(method.name,
                                                reports[-1].accuracy))

    CompareOutput = collections.namedtuple(
        'CompareOutput',
        ['reports', 'table'])
    return CompareOutput(reports=reports, table=report_table(reports))

def report_table(reports):
    """
    Comparison table of method reports.

    The ``config`` column holds each method's configuration as compact
    JSON with sorted keys.

    """
    rows = []
    for r in reports:
        rows.append([r.method, r.precision, r.recall, r.f1, r.accuracy,
                     r.train_ms, r.test_ms,
                     json.dumps(WellClass.io.to_builtin(r.config),
                                sort_keys=True)])
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)

def format_table(table):
    """
    Aligned text rendering of a comparison table.

    """
    return table.to_string(index=False,
                           float_format=lambda x: '{:.4f}'.format(x))

def write_report(table, path, xlsx_path=None):
    """
    Write a comparison table as CSV, and optionally as an Excel workbook.

    """
    table.to_csv(path, index=False)
    if xlsx_path is not None:
        WellClass.io.write_workbook(xlsx_path, [('Comparison', table)])
