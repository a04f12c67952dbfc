"""
Binary logistic regression.

The class probability is modelled as ``P(y=1|x) = expit(b0 + b^T x)``.
Parameters minimize the negative log-likelihood plus an L2 penalty
``(lambda/2) ||b||^2`` on the weights (the intercept is not penalized).
The default ``lambda=1`` corresponds to an inverse regularization
strength ``C=1``.

"""

import collections

import numpy as np
import scipy.special

import WellClass.io
from WellClass.errors import ConfigError, DataError, TrainingError

LogRModel = collections.namedtuple(
    'LogRModel',
    ['intercept', 'weights', 'reg_strength', 'converged', 'iterations'])

LogRConfig = collections.namedtuple(
    'LogRConfig',
    ['reg_strength', 'max_iter', 'tol', 'optimizer'],
    defaults=[1.0, 200, 1e-8, 'newton'])

OPTIMIZERS = ('newton', 'gradient')

def validate_config(config):
    if not config.reg_strength >= 0:
        raise ConfigError("reg_strength should be non-negative")
    if int(config.max_iter) < 1:
        raise ConfigError("max_iter should be at least 1")
    if not config.tol > 0:
        raise ConfigError("tol should be positive")
    if config.optimizer not in OPTIMIZERS:
        raise ConfigError("optimizer should be one of {}, got {!r}".format(
            OPTIMIZERS, config.optimizer))
    return config

def _design(X, single=False):
    # A 1-D input is one feature per row when training and a single
    # sample when predicting
    X = np.asarray(X.values if hasattr(X, 'feature_names') else X,
                   dtype=np.float64)
    if X.ndim == 1:
        X = X[np.newaxis, :] if single else X[:, np.newaxis]
    return X

def loss(theta, X, y, reg_strength):
    """
    Penalized negative log-likelihood.

    Parameters
    ----------
    theta : numpy array
        ``[b0, b_1, ..., b_d]``.
    X : numpy array
        Nxd features.
    y : numpy array
        Labels in {0, 1}.
    reg_strength : float
        L2 penalty on the weights.

    """
    z = theta[0] + np.dot(X, theta[1:])
    return (np.sum(np.logaddexp(0., z) - y*z)
            + 0.5*reg_strength*np.dot(theta[1:], theta[1:]))

def _gradient(theta, X, y, reg_strength):
    p = scipy.special.expit(theta[0] + np.dot(X, theta[1:]))
    r = p - y
    g = np.empty_like(theta)
    g[0] = np.sum(r)
    g[1:] = np.dot(X.T, r) + reg_strength*theta[1:]
    return g, p

def _hessian(X, p, reg_strength):
    w = p*(1. - p)
    Xa = np.hstack([np.ones((X.shape[0], 1)), X])
    H = np.dot(Xa.T * w, Xa)
    H[1:, 1:] += reg_strength*np.eye(X.shape[1])
    return H

def fit(X, y=None, config=None):
    """
    Fit a logistic regression model.

    Parameters
    ----------
    X : FeatureMatrix or array_like
        Nxd features. If a FeatureMatrix and `y` is None, its labels are
        used.
    y : array_like, optional
        Labels in {0, 1}.
    config : LogRConfig, optional
        Default ``LogRConfig()``.

    Returns
    -------
    LogRModel
        ``converged`` is True if the gradient infinity norm dropped below
        ``config.tol`` within ``config.max_iter`` iterations.

    Raises
    ------
    DataError
        If only one class is present, or `X` is not finite.
    TrainingError
        If the loss becomes non-finite.

    Notes
    -----
    The Newton optimizer halves the step until the loss does not increase.
    The gradient optimizer uses backtracking line search with the Armijo
    condition.

    """
    if config is None:
        config = LogRConfig()
    validate_config(config)
    if y is None:
        y = X.labels
    X = _design(X)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.shape[0] != y.size:
        raise DataError("X has {} rows but {} labels given".format(
            X.shape[0], y.size))
    if not np.all(np.isfinite(X)):
        raise DataError("features contain non-finite values")
    if not np.all((y == 0) | (y == 1)):
        raise DataError("labels should be 0 or 1")
    if np.all(y == y[0]):
        raise DataError("both classes should be present")

    lam = float(config.reg_strength)
    theta = np.zeros(X.shape[1] + 1)
    f = loss(theta, X, y, lam)
    converged = False
    iterations = 0
    for it in range(int(config.max_iter)):
        g, p = _gradient(theta, X, y, lam)
        if np.max(np.abs(g)) < config.tol:
            converged = True
            break
        iterations = it + 1

        if config.optimizer == 'newton':
            H = _hessian(X, p, lam)
            try:
                direction = -np.linalg.solve(H, g)
            except np.linalg.LinAlgError:
                direction = -np.linalg.lstsq(H, g, rcond=None)[0]
            step = 1.
            while True:
                candidate = theta + step*direction
                f_new = loss(candidate, X, y, lam)
                if f_new <= f or step < 1e-10:
                    break
                step *= 0.5
        else:
            direction = -g
            step = 1.
            gg = np.dot(g, g)
            while True:
                candidate = theta + step*direction
                f_new = loss(candidate, X, y, lam)
                if f_new <= f - 1e-4*step*gg or step < 1e-12:
                    break
                step *= 0.5

        if not np.isfinite(f_new):
            raise TrainingError("non-finite loss at iteration {}".format(
                iterations))
        theta = candidate
        f = f_new
    else:
        g, _ = _gradient(theta, X, y, lam)
        converged = bool(np.max(np.abs(g)) < config.tol)

    return LogRModel(intercept=float(theta[0]),
                     weights=theta[1:].copy(),
                     reg_strength=lam,
                     converged=converged,
                     iterations=iterations)

def decision_function(model, X):
    """
    Linear predictor ``b0 + b^T x`` (the log-odds).

    Parameters
    ----------
    model : LogRModel
    X : FeatureMatrix or array_like
        Nxd features, or a single sample as a d-vector.

    Returns
    -------
    numpy array
        One log-odds value per sample.

    Raises
    ------
    DataError
        If the number of features does not match the model.

    """
    X = _design(X, single=True)
    if X.shape[1] != model.weights.size:
        raise DataError("expected {} features, got {}".format(
            model.weights.size, X.shape[1]))
    return model.intercept + np.dot(X, model.weights)

def predict_proba(model, X):
    """
    Probability of class 1, ``exp(z) / (1 + exp(z))``.

    Evaluated with `scipy.special.expit`, which does not overflow for
    large ``|z|``.

    """
    return scipy.special.expit(decision_function(model, X))

def predict(model, X):
    """
    Predicted labels: 1 where the probability is at least 0.5, else 0.

    """
    return (decision_function(model, X) >= 0.).astype(int)

###
# Persistence
###

def to_dict(model):
    return {'intercept': model.intercept,
            'weights': model.weights,
            'lambda': model.reg_strength,
            'converged': model.converged,
            'iterations': model.iterations}

def from_dict(record):
    return LogRModel(intercept=float(record['intercept']),
                     weights=np.array(record['weights'], dtype=np.float64),
                     reg_strength=float(record['lambda']),
                     converged=bool(record.get('converged', True)),
                     iterations=int(record.get('iterations', 0)))

def save(model, path):
    WellClass.io.write_json(to_dict(model), path)

def load(path):
    return from_dict(WellClass.io.read_json(path))
