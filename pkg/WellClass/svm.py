"""
Soft-margin support vector machines.

Models are trained by solving the dual quadratic program::

    min  1/2 a^T H a - sum(a)
    s.t. sum(a_i y_i) = 0,  0 <= a_i <= C

with ``H_ij = y_i y_j K(x_i, x_j)`` and labels mapped to {-1, +1}, by
sequential minimal optimization. Each step picks the maximal violating
pair of multipliers (first-order working set selection) and solves the
two-variable subproblem analytically. Iteration stops when the largest
KKT violation gap falls below `tol`.

"""

import collections
import multiprocessing

import numpy as np
import scipy.spatial.distance

import WellClass.io
import WellClass.evaluate
from WellClass.errors import ConfigError, DataError, TrainingError

Kernel = collections.namedtuple(
    'Kernel',
    ['name', 'gamma'],
    defaults=['linear', None])

SvmModel = collections.namedtuple(
    'SvmModel',
    ['alphas', 'support_x', 'support_y', 'support_indices', 'bias',
     'kernel', 'C', 'w', 'iterations'])

KERNELS = ('linear', 'rbf')

def linear_kernel():
    return Kernel(name='linear', gamma=None)

def rbf_kernel(gamma='scale'):
    return Kernel(name='rbf', gamma=gamma)

def resolve_kernel(kernel, X=None):
    """
    Validate a kernel and resolve ``gamma='scale'``.

    The scale convention sets ``gamma = 1 / (d * mean column variance)``
    of the training features `X` (1 if that variance is zero).

    Raises
    ------
    ConfigError
        If the kernel name is unknown or gamma is not positive.

    """
    if kernel is None:
        kernel = linear_kernel()
    if kernel.name not in KERNELS:
        raise ConfigError("kernel should be one of {}, got {!r}".format(
            KERNELS, kernel.name))
    if kernel.name == 'linear':
        return Kernel(name='linear', gamma=None)
    gamma = kernel.gamma
    if gamma is None or gamma == 'scale':
        if X is None:
            raise ConfigError("gamma='scale' requires training data")
        X = np.asarray(X, dtype=np.float64)
        variance = np.mean(np.var(X, axis=0))
        gamma = 1. / (X.shape[1]*variance) if variance > 0 else 1.
    if not float(gamma) > 0:
        raise ConfigError("rbf gamma should be positive, got {}".format(gamma))
    return Kernel(name='rbf', gamma=float(gamma))

def kernel_eval(kernel, x, z):
    """
    Kernel value of two vectors: ``x^T z`` (linear) or
    ``exp(-gamma ||x - z||^2)`` (rbf).

    Raises
    ------
    DataError
        If the dimensions differ.

    """
    x = np.asarray(x, dtype=np.float64).ravel()
    z = np.asarray(z, dtype=np.float64).ravel()
    if x.size != z.size:
        raise DataError("dimension mismatch: {} and {}".format(x.size,
                                                               z.size))
    if kernel.name == 'linear':
        return float(np.dot(x, z))
    diff = x - z
    return float(np.exp(-kernel.gamma*np.dot(diff, diff)))

def kernel_matrix(kernel, A, B):
    """
    Kernel matrix between the rows of `A` and the rows of `B`.

    """
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    B = np.atleast_2d(np.asarray(B, dtype=np.float64))
    if A.shape[1] != B.shape[1]:
        raise DataError("dimension mismatch: {} and {}".format(A.shape[1],
                                                               B.shape[1]))
    if kernel.name == 'linear':
        return np.dot(A, B.T)
    return np.exp(-kernel.gamma
                  * scipy.spatial.distance.cdist(A, B, 'sqeuclidean'))

class _KernelRows(object):
    """
    Least-recently-used cache of kernel matrix rows.

    """
    def __init__(self, kernel, X, max_rows):
        self.kernel = kernel
        self.X = X
        self.max_rows = max_rows
        self.rows = collections.OrderedDict()

    def __getitem__(self, i):
        if i in self.rows:
            self.rows.move_to_end(i)
            return self.rows[i]
        row = kernel_matrix(self.kernel, self.X[i:i + 1], self.X)[0]
        self.rows[i] = row
        if len(self.rows) > self.max_rows:
            self.rows.popitem(last=False)
        return row

    def diagonal(self):
        if self.kernel.name == 'linear':
            return np.einsum('ij,ij->i', self.X, self.X)
        return np.ones(self.X.shape[0])

def _check_data(X, y):
    if y is None:
        y = X.labels
    X = np.asarray(X.values if hasattr(X, 'feature_names') else X,
                   dtype=np.float64)
    if X.ndim == 1:
        X = X[:, np.newaxis]
    y = np.asarray(y).astype(int).ravel()
    if X.shape[0] != y.size:
        raise DataError("X has {} rows but {} labels given".format(
            X.shape[0], y.size))
    if not np.all(np.isfinite(X)):
        raise DataError("features contain non-finite values")
    if not np.all((y == 0) | (y == 1)):
        raise DataError("labels should be 0 or 1")
    return X, y

def fit(X, y=None, kernel=None, C=1.0, tol=1e-3, max_iter=1000000,
        cache_rows=2000):
    """
    Train a soft-margin SVM by sequential minimal optimization.

    Parameters
    ----------
    X : FeatureMatrix or array_like
        NxD features. If a FeatureMatrix and `y` is None, its labels are
        used.
    y : array_like, optional
        Labels in {0, 1}, mapped to {-1, +1}.
    kernel : Kernel, optional
        Default linear. An rbf kernel with ``gamma='scale'`` or None is
        resolved against `X`.
    C : float, optional
        Penalty of margin violations, positive.
    tol : float, optional
        Stopping tolerance on the maximal KKT violation gap.
    max_iter : int, optional
        Maximum number of pair updates.
    cache_rows : int, optional
        Number of kernel matrix rows kept in memory.

    Returns
    -------
    SvmModel
        Only support vectors (``alpha > 0``) are stored. The bias is the
        mean of ``y_t - sum_j a_j y_j K(x_j, x_t)`` over margin support
        vectors (``0 < alpha < C``), or the midpoint of the feasible
        interval if there are none. For the linear kernel,
        ``w = sum_i a_i y_i x_i`` is stored as well.

    Raises
    ------
    ConfigError
        If `C` or `tol` are not positive.
    DataError
        If only one class is present.
    TrainingError
        If the tolerance is not reached within `max_iter` updates. The
        message reports the remaining violation.

    """
    if not C > 0:
        raise ConfigError("C should be positive, got {}".format(C))
    if not tol > 0:
        raise ConfigError("tol should be positive, got {}".format(tol))
    X, y01 = _check_data(X, y)
    if np.all(y01 == y01[0]):
        raise DataError("both classes should be present")
    kernel = resolve_kernel(kernel, X)
    s = 2.*y01 - 1.
    n = s.size
    C = float(C)

    rows = _KernelRows(kernel, X, cache_rows)
    k_diag = rows.diagonal()
    alpha = np.zeros(n)
    # Gradient of the dual objective, H a - 1
    G = -np.ones(n)

    iterations = 0
    while True:
        minus_sG = -s*G
        up = ((alpha < C) & (s > 0)) | ((alpha > 0) & (s < 0))
        low = ((alpha < C) & (s < 0)) | ((alpha > 0) & (s > 0))
        i = np.flatnonzero(up)[np.argmax(minus_sG[up])]
        j = np.flatnonzero(low)[np.argmin(minus_sG[low])]
        gap = minus_sG[i] - minus_sG[j]
        if gap < tol:
            break
        if iterations >= max_iter:
            raise TrainingError("SMO did not converge in {} iterations: "
                                "largest KKT violation {:g}".format(
                                    max_iter, gap))
        iterations += 1

        k_i = rows[i]
        k_j = rows[j]
        eta = k_diag[i] + k_diag[j] - 2.*k_i[j]
        step = gap / max(eta, 1e-12)
        # Move a_i by s_i*step and a_j by -s_j*step, within the box
        room_i = C - alpha[i] if s[i] > 0 else alpha[i]
        room_j = alpha[j] if s[j] > 0 else C - alpha[j]
        step = min(step, room_i, room_j)

        alpha[i] += s[i]*step
        alpha[j] -= s[j]*step
        if step == room_i:
            alpha[i] = C if s[i] > 0 else 0.
        if step == room_j:
            alpha[j] = 0. if s[j] > 0 else C
        G += step*s*(k_i - k_j)

    alpha[alpha <= 1e-12*C] = 0.

    minus_sG = -s*G
    free = (alpha > 0) & (alpha < C)
    if np.any(free):
        bias = float(np.mean(minus_sG[free]))
    else:
        up = ((alpha < C) & (s > 0)) | ((alpha > 0) & (s < 0))
        low = ((alpha < C) & (s < 0)) | ((alpha > 0) & (s > 0))
        bias = 0.5*(np.max(minus_sG[up]) + np.min(minus_sG[low]))

    support = np.flatnonzero(alpha > 0)
    w = None
    if kernel.name == 'linear':
        w = np.dot(alpha[support]*s[support], X[support])
    return SvmModel(alphas=alpha[support],
                    support_x=X[support],
                    support_y=s[support],
                    support_indices=support,
                    bias=bias,
                    kernel=kernel,
                    C=C,
                    w=w,
                    iterations=iterations)

def decision_function(model, X, form='auto'):
    """
    Decision function ``D(x) = sum_j y_j a_j K(x_j, x) + b``.

    Parameters
    ----------
    model : SvmModel
    X : FeatureMatrix or array_like
        NxD features, or a single D-vector.
    form : {'auto', 'dual', 'primal'}, optional
        'primal' evaluates ``w^T x + b`` (linear kernel only). 'auto' uses
        the primal form when available.

    Raises
    ------
    DataError
        If the dimension does not match the model.

    """
    X = np.asarray(X.values if hasattr(X, 'feature_names') else X,
                   dtype=np.float64)
    if X.ndim == 1:
        X = X[np.newaxis, :]
    d = model.support_x.shape[1]
    if X.shape[1] != d:
        raise DataError("expected {} features, got {}".format(d, X.shape[1]))
    if form == 'auto':
        form = 'primal' if model.w is not None else 'dual'
    if form == 'primal':
        if model.w is None:
            raise ConfigError("primal form requires a linear kernel")
        return np.dot(X, model.w) + model.bias
    elif form == 'dual':
        K = kernel_matrix(model.kernel, X, model.support_x)
        return np.dot(K, model.alphas*model.support_y) + model.bias
    else:
        raise ConfigError("form should be 'auto', 'dual' or 'primal'")

def predict(model, X):
    """
    Predicted labels: 1 where ``D(x) >= 0``, else 0.

    """
    return (decision_function(model, X) >= 0.).astype(int)

def n_support(model):
    """
    Number of support vectors, and of those at the upper bound C.

    """
    return (int(model.alphas.size),
            int(np.sum(model.alphas >= model.C*(1. - 1e-12))))

def dual_objective(alphas, X, y, kernel):
    """
    Dual objective ``1/2 a^T H a - sum(a)`` for labels `y` in {0, 1}.

    """
    X = np.asarray(X, dtype=np.float64)
    s = 2.*np.asarray(y, dtype=np.float64) - 1.
    v = np.asarray(alphas, dtype=np.float64)*s
    return float(0.5*np.dot(v, np.dot(kernel_matrix(kernel, X, X), v))
                 - np.sum(alphas))

def model_dual_objective(model):
    """
    Dual objective of a trained model.

    """
    v = model.alphas*model.support_y
    K = kernel_matrix(model.kernel, model.support_x, model.support_x)
    return float(0.5*np.dot(v, np.dot(K, v)) - np.sum(model.alphas))

###
# Tuning
###

def _score_C(args):
    C, kernel, X, y, k_folds, seed, tol = args

    def fit_fxn(X_train, y_train):
        return fit(X_train, y_train, kernel=kernel, C=C, tol=tol)

    return WellClass.evaluate.cross_val_accuracy(fit_fxn, predict, X, y,
                                                 k_folds=k_folds, seed=seed)

def tune_C(X, y=None, kernel=None, c_grid=(0.1, 1., 10.), k_folds=5, seed=0,
           tol=1e-3, n_jobs=1, verbose=False):
    """
    Select C by stratified k-fold cross validation.

    Ties in mean accuracy (within 1e-12) go to the smallest C.

    Parameters
    ----------
    X : FeatureMatrix or array_like
        NxD features.
    y : array_like, optional
        Labels. Taken from `X` if it is a FeatureMatrix.
    kernel : Kernel, optional
        Kernel, resolved once against the full `X`.
    c_grid : list of float, optional
        Candidate values of C.
    k_folds : int, optional
    seed : int, optional
    tol : float, optional
    n_jobs : int, optional
        Number of worker processes.
    verbose : bool, optional

    Returns
    -------
    best_C : float
    best_score : float
    scores : list of (float, float)
        ``(C, accuracy)`` of every candidate.
    on_boundary : bool
        True if the selected C is the smallest or largest of the grid.

    """
    X, y = _check_data(X, y)
    c_grid = sorted(float(c) for c in c_grid)
    if len(c_grid) == 0:
        raise ConfigError("c_grid should not be empty")
    kernel = resolve_kernel(kernel, X)
    tasks = [(C, kernel, X, y, k_folds, seed, tol) for C in c_grid]
    if verbose:
        print("Scoring {} values of C...".format(len(c_grid)))
    if n_jobs > 1:
        pool = multiprocessing.Pool(n_jobs)
        try:
            scores = pool.map(_score_C, tasks)
        finally:
            pool.close()
            pool.join()
    else:
        scores = [_score_C(task) for task in tasks]

    best = 0
    for k in range(1, len(c_grid)):
        if scores[k] > scores[best] + 1e-12:
            best = k
    TuneOutput = collections.namedtuple(
        'TuneOutput',
        ['best_C', 'best_score', 'scores', 'on_boundary'])
    return TuneOutput(best_C=c_grid[best],
                      best_score=scores[best],
                      scores=list(zip(c_grid, scores)),
                      on_boundary=len(c_grid) > 1
                      and best in (0, len(c_grid) - 1))

###
# Persistence
###

def to_dict(model):
    return {'kernel': model.kernel._asdict(),
            'C': model.C,
            'bias': model.bias,
            'alphas': model.alphas,
            'support_vectors': model.support_x,
            'labels': model.support_y,
            'support_indices': model.support_indices,
            'w': model.w,
            'iterations': model.iterations}

def from_dict(record):
    w = record.get('w')
    return SvmModel(alphas=np.array(record['alphas'], dtype=np.float64),
                    support_x=np.array(record['support_vectors'],
                                       dtype=np.float64),
                    support_y=np.array(record['labels'], dtype=np.float64),
                    support_indices=np.array(record['support_indices'],
                                             dtype=int),
                    bias=float(record['bias']),
                    kernel=Kernel(**record['kernel']),
                    C=float(record['C']),
                    w=None if w is None else np.array(w, dtype=np.float64),
                    iterations=int(record.get('iterations', 0)))

def save(model, path):
    WellClass.io.write_json(to_dict(model), path)

def load(path):
    return from_dict(WellClass.io.read_json(path))
