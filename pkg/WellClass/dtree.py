"""
Binary classification trees.

Trees are grown greedily with binary splits ``x[feature] <= threshold``,
where candidate thresholds are midpoints between consecutive distinct
feature values. The split minimizing the weighted child impurity (Gini or
entropy) is chosen; ties go to the lowest feature index, then to the
lowest threshold. Growth can be limited beforehand (maximum depth,
minimum samples to split, minimum samples per leaf) and trees can be
pruned afterwards along their cost-complexity path.

Trees are immutable nested `TreeNode` records. A leaf has ``feature ==
-1`` and no children. Every node carries the split criterion the tree
was grown with, which pruning uses to evaluate node impurities.

"""

import collections
import itertools
import multiprocessing

import numpy as np
import scipy.special

import WellClass.io
import WellClass.evaluate
from WellClass.errors import ConfigError, DataError

TreeNode = collections.namedtuple(
    'TreeNode',
    ['feature', 'threshold', 'left', 'right', 'impurity', 'n_samples',
     'class_counts', 'predicted', 'criterion'],
    defaults=['gini'])

TreeConfig = collections.namedtuple(
    'TreeConfig',
    ['criterion', 'max_depth', 'min_samples_split', 'min_samples_leaf',
     'ccp_alpha'],
    defaults=['gini', None, 2, 1, 0.])

PruningStep = collections.namedtuple(
    'PruningStep',
    ['alpha', 'node_count', 'depth', 'tree', 'train_accuracy'])

TreeSummary = collections.namedtuple(
    'TreeSummary',
    ['node_count', 'depth', 'n_leaves'])

CRITERIA = ('gini', 'entropy')

###
# Impurity measures
###

def _counts(counts):
    counts = np.asarray(counts, dtype=np.float64)
    if np.any(counts < 0) or not np.sum(counts) > 0:
        raise DataError("impurity of an empty node is undefined")
    return counts

def gini(counts):
    """
    Gini impurity ``1 - sum(p_k^2)`` of class counts.

    Raises
    ------
    DataError
        If the counts sum to zero.

    """
    counts = _counts(counts)
    p = counts / np.sum(counts)
    return float(1. - np.sum(p*p))

def entropy(counts):
    """
    Base-2 entropy ``-sum(p_k log2 p_k)`` of class counts, skipping empty
    classes.

    Raises
    ------
    DataError
        If the counts sum to zero.

    """
    counts = _counts(counts)
    p = counts / np.sum(counts)
    p = p[p > 0]
    return float(-np.sum(p*np.log2(p)))

IMPURITY = {'gini': gini, 'entropy': entropy}

def weighted_child_impurity(parent, children, criterion='gini'):
    """
    Impurity of a split: ``sum(|d_i|/|d| impurity(d_i))``.

    Empty children have zero weight.

    Parameters
    ----------
    parent : array_like
        Class counts of the parent node.
    children : list of array_like
        Class counts of the child nodes.
    criterion : {'gini', 'entropy'}, optional

    Raises
    ------
    DataError
        If the children counts do not add up to the parent counts.

    """
    impurity_fxn = IMPURITY[criterion]
    parent = _counts(parent)
    children = [np.asarray(c, dtype=np.float64) for c in children]
    if not np.array_equal(np.sum(children, axis=0), parent):
        raise DataError("children do not partition the parent node")
    total = np.sum(parent)
    return float(sum(np.sum(c)/total*impurity_fxn(c)
                     for c in children if np.sum(c) > 0))

def info_gain(parent, children):
    """
    Information gain of a split: parent entropy minus the weighted child
    entropy.

    """
    return entropy(parent) - weighted_child_impurity(parent,
                                                     children,
                                                     'entropy')

def _impurity_vec(c0, c1, criterion):
    n = c0 + c1
    p0 = c0 / n
    p1 = c1 / n
    if criterion == 'gini':
        return 1. - p0*p0 - p1*p1
    else:
        return -(scipy.special.xlogy(p0, p0)
                 + scipy.special.xlogy(p1, p1)) / np.log(2.)

###
# Growing
###

def validate_config(config):
    if config.criterion not in CRITERIA:
        raise ConfigError("criterion should be one of {}, got {!r}".format(
            CRITERIA, config.criterion))
    if config.max_depth is not None and int(config.max_depth) < 1:
        raise ConfigError("max_depth should be at least 1 or None")
    if int(config.min_samples_split) < 2:
        raise ConfigError("min_samples_split should be at least 2")
    if int(config.min_samples_leaf) < 1:
        raise ConfigError("min_samples_leaf should be at least 1")
    if not config.ccp_alpha >= 0:
        raise ConfigError("ccp_alpha should be non-negative")
    return config

def best_split(X, y, criterion='gini', min_samples_leaf=1):
    """
    Find the split of a node with the lowest weighted child impurity.

    Parameters
    ----------
    X : numpy array
        NxD features of the samples in the node.
    y : numpy array
        Labels in {0, 1}.
    criterion : {'gini', 'entropy'}, optional
    min_samples_leaf : int, optional
        Minimum number of samples on each side of the split.

    Returns
    -------
    tuple or None
        ``(weighted_impurity, feature, threshold)``, or None if no valid
        split exists.

    """
    n, d = X.shape
    total1 = float(np.sum(y))
    total0 = n - total1
    n_left = np.arange(1, n, dtype=np.float64)
    best = None
    for j in range(d):
        order = np.argsort(X[:, j], kind='stable')
        xs = X[order, j]
        c1 = np.cumsum(y[order])[:-1].astype(np.float64)
        c0 = n_left - c1
        valid = ((xs[1:] > xs[:-1])
                 & (n_left >= min_samples_leaf)
                 & (n - n_left >= min_samples_leaf))
        if not np.any(valid):
            continue
        with np.errstate(invalid='ignore', divide='ignore'):
            imp_left = _impurity_vec(c0, c1, criterion)
            imp_right = _impurity_vec(total0 - c0, total1 - c1, criterion)
        weighted = np.where(valid,
                            (n_left*imp_left + (n - n_left)*imp_right) / n,
                            np.inf)
        i = np.flatnonzero(weighted <= np.min(weighted) + 1e-12)[0]
        if best is None or weighted[i] < best[0] - 1e-12:
            threshold = 0.5*(xs[i] + xs[i + 1])
            # Midpoint may round up to the upper value
            if not threshold < xs[i + 1]:
                threshold = xs[i]
            best = (float(weighted[i]), j, float(threshold))
    return best

def _make_leaf(y, criterion):
    n1 = int(np.sum(y))
    counts = (int(y.size) - n1, n1)
    return TreeNode(feature=-1,
                    threshold=None,
                    left=None,
                    right=None,
                    impurity=IMPURITY[criterion](counts),
                    n_samples=int(y.size),
                    class_counts=counts,
                    predicted=1 if counts[1] >= counts[0] else 0,
                    criterion=criterion)

def _grow(X, y, depth, config):
    leaf = _make_leaf(y, config.criterion)
    n = y.size
    if min(leaf.class_counts) == 0 \
            or (config.max_depth is not None and depth >= config.max_depth) \
            or n < config.min_samples_split \
            or n < 2*config.min_samples_leaf:
        return leaf

    split = best_split(X, y, config.criterion, config.min_samples_leaf)
    # Splits that do not increase the impurity are allowed, which lets
    # greedy growth get past XOR-like configurations
    if split is None or split[0] > leaf.impurity + 1e-12:
        return leaf
    _, feature, threshold = split
    mask = X[:, feature] <= threshold
    return leaf._replace(feature=feature,
                         threshold=threshold,
                         left=_grow(X[mask], y[mask], depth + 1, config),
                         right=_grow(X[~mask], y[~mask], depth + 1, config))

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

def fit(X, y=None, config=None):
    """
    Grow a classification tree.

    Parameters
    ----------
    X : FeatureMatrix or array_like
        NxD features. If a FeatureMatrix and `y` is None, its labels are
        used.
    y : array_like, optional
        Labels in {0, 1}.
    config : TreeConfig, optional
        Default ``TreeConfig()``: Gini, unlimited depth, no pruning. If
        ``ccp_alpha > 0`` the grown tree is pruned with `prune`.

    Returns
    -------
    TreeNode
        Root of the tree.

    Raises
    ------
    DataError
        If only one class is present.

    """
    if config is None:
        config = TreeConfig()
    validate_config(config)
    X, y = _check_data(X, y)
    if np.all(y == y[0]):
        raise DataError("both classes should be present")
    tree = _grow(X, y, 0, config)
    if config.ccp_alpha > 0:
        tree = prune(tree, config.ccp_alpha)
    return tree

def is_leaf(node):
    return node.feature < 0

def _route(node, X, idx, out):
    if is_leaf(node):
        out[idx] = node.predicted
        return
    mask = X[idx, node.feature] <= node.threshold
    _route(node.left, X, idx[mask], out)
    _route(node.right, X, idx[~mask], out)

def predict(tree, X):
    """
    Predict labels by routing samples to leaves.

    Samples go left when ``x[feature] <= threshold``. A leaf predicts its
    majority class, with ties going to label 1.

    """
    X = np.asarray(X.values if hasattr(X, 'feature_names') else X,
                   dtype=np.float64)
    if X.ndim == 1:
        X = X[np.newaxis, :]
    out = np.zeros(X.shape[0], dtype=int)
    _route(tree, X, np.arange(X.shape[0]), out)
    return out

###
# Structure
###

def iter_nodes(tree):
    """
    Iterate over all nodes in pre-order.

    """
    stack = [tree]
    while stack:
        node = stack.pop()
        yield node
        if not is_leaf(node):
            stack.append(node.right)
            stack.append(node.left)

def depth(tree):
    if is_leaf(tree):
        return 0
    return 1 + max(depth(tree.left), depth(tree.right))

def summary(tree):
    """
    Node count, depth and number of leaves of a tree.

    """
    nodes = list(iter_nodes(tree))
    return TreeSummary(node_count=len(nodes),
                       depth=depth(tree),
                       n_leaves=sum(1 for node in nodes if is_leaf(node)))

###
# Cost-complexity pruning
###

RISKS = ('misclassification', 'impurity')

def _node_risk(node, n_total, risk, criterion):
    if risk == 'misclassification':
        return (node.n_samples - max(node.class_counts)) / float(n_total)
    else:
        return IMPURITY[criterion](node.class_counts) \
            * node.n_samples / float(n_total)

def _collapse(node):
    return node._replace(feature=-1, threshold=None, left=None, right=None)

def _link_strengths(node, n_total, risk, criterion, out):
    """
    Compute subtree risk and leaf count, and store the effective alpha of
    every internal node in `out`, keyed by node identity.

    """
    if is_leaf(node):
        return _node_risk(node, n_total, risk, criterion), 1
    r_left, l_left = _link_strengths(node.left, n_total, risk, criterion, out)
    r_right, l_right = _link_strengths(node.right, n_total, risk, criterion,
                                       out)
    r_subtree = r_left + r_right
    n_leaves = l_left + l_right
    out[id(node)] = (_node_risk(node, n_total, risk, criterion) - r_subtree) \
        / (n_leaves - 1)
    return r_subtree, n_leaves

def _collapse_weak(node, strengths, threshold):
    if is_leaf(node):
        return node
    if strengths[id(node)] <= threshold:
        return _collapse(node)
    return node._replace(left=_collapse_weak(node.left, strengths, threshold),
                         right=_collapse_weak(node.right, strengths,
                                              threshold))

def _weakest_link_step(tree, risk, criterion):
    strengths = {}
    _link_strengths(tree, tree.n_samples, risk, criterion, strengths)
    g_min = min(strengths.values())
    return g_min, _collapse_weak(tree, strengths, g_min + 1e-12)

def ccp_path(tree, X_train=None, y_train=None, risk='misclassification'):
    """
    Cost-complexity pruning path of a tree.

    Starting from the full tree, the internal node(s) with the smallest
    effective alpha ``(R(node) - R(subtree)) / (n_leaves(subtree) - 1)``
    are collapsed into leaves, repeatedly, until only the root remains.
    R is the fraction of training samples misclassified by a node
    (``risk='misclassification'``), or the node impurity weighted by the
    node's sample fraction (``risk='impurity'``).

    Parameters
    ----------
    tree : TreeNode
        Unpruned tree.
    X_train, y_train : array_like, optional
        Training data. If given, the training accuracy of every tree on
        the path is reported.
    risk : {'misclassification', 'impurity'}, optional

    Returns
    -------
    list of PruningStep
        Steps ``(alpha, node_count, depth, tree, train_accuracy)`` sorted
        by non-decreasing alpha. The first step is the full tree at alpha
        0 and the last is the root alone.

    """
    if risk not in RISKS:
        raise ConfigError("risk should be one of {}".format(RISKS))
    criterion = tree.criterion
    if X_train is not None:
        X_train, y_train = _check_data(X_train, y_train)

    def make_step(alpha, t):
        s = summary(t)
        acc = None
        if X_train is not None:
            acc = WellClass.evaluate.accuracy(predict(t, X_train), y_train)
        return PruningStep(alpha=float(alpha),
                           node_count=s.node_count,
                           depth=s.depth,
                           tree=t,
                           train_accuracy=acc)

    path = [make_step(0., tree)]
    current = tree
    while not is_leaf(current):
        g_min, current = _weakest_link_step(current, risk, criterion)
        path.append(make_step(max(g_min, path[-1].alpha, 0.), current))
    return path

def prune(tree, alpha, risk='misclassification'):
    """
    Prune a tree at complexity parameter `alpha`.

    Weakest links are collapsed while their effective alpha does not
    exceed `alpha`. The result is the smallest subtree minimizing
    ``R(T) + alpha * n_leaves(T)``. ``alpha=0`` returns the tree
    unchanged.

    """
    if alpha < 0:
        raise ConfigError("alpha should be non-negative")
    if alpha == 0:
        return tree
    criterion = tree.criterion
    current = tree
    while not is_leaf(current):
        strengths = {}
        _link_strengths(current, current.n_samples, risk, criterion,
                        strengths)
        g_min = min(strengths.values())
        if g_min > alpha + 1e-12:
            break
        current = _collapse_weak(current, strengths, g_min + 1e-12)
    return current

###
# Hyperparameter search
###

# Pre-pruning grids and post-pruning alphas, keyed by (feature set,
# criterion). min_samples_split is searched in 2..4 and min_samples_leaf
# in 1..2 for every feature set.
TABLE_PRESETS = {
    ('std', 'entropy'): (range(2, 14), 0.003),
    ('std', 'gini'): (range(2, 14), 0.002),
    ('cov', 'entropy'): (range(2, 6), 0.01),
    ('cov', 'gini'): (range(2, 7), 0.003),
    ('cov-pca4', 'entropy'): (range(2, 9), 0.01),
    ('cov-pca4', 'gini'): (range(2, 9), 0.003),
}

def preset_grid(features='std', criterion='entropy'):
    """
    Pre-pruning grid for a feature set and criterion.

    Returns
    -------
    dict
        ``{'max_depth': [...], 'min_samples_split': [2, 3, 4],
        'min_samples_leaf': [1, 2]}``

    """
    try:
        depths, _ = TABLE_PRESETS[(features, criterion)]
    except KeyError:
        raise ConfigError("no preset for features {!r} and criterion {!r}"
                          .format(features, criterion))
    return {'max_depth': list(depths),
            'min_samples_split': [2, 3, 4],
            'min_samples_leaf': [1, 2]}

def preset_ccp_alpha(features='std', criterion='entropy', noise_level=1):
    """
    Post-pruning alpha for a feature set, criterion and noise level.

    The 4-PC covariance features with the entropy criterion use 0.01,
    except at noise level 50 where 0.003 is used.

    """
    try:
        _, alpha = TABLE_PRESETS[(features, criterion)]
    except KeyError:
        raise ConfigError("no preset for features {!r} and criterion {!r}"
                          .format(features, criterion))
    if (features, criterion) == ('cov-pca4', 'entropy') and noise_level == 50:
        alpha = 0.003
    return alpha

def _fit_fxn(config):
    def fit_fxn(X, y):
        return fit(X, y, config)
    return fit_fxn

def _score_candidate(args):
    """
    Cross-validated accuracy of one configuration. Runs in worker
    processes when ``n_jobs > 1``.

    """
    config, X, y, k_folds, seed = args
    return WellClass.evaluate.cross_val_accuracy(_fit_fxn(config),
                                                 predict,
                                                 X,
                                                 y,
                                                 k_folds=k_folds,
                                                 seed=seed)

def _simpler(a, b):
    """
    Whether config `a` is simpler than `b`: smaller max_depth, then larger
    min_samples_leaf.

    """
    depth_a = np.inf if a.max_depth is None else a.max_depth
    depth_b = np.inf if b.max_depth is None else b.max_depth
    if depth_a != depth_b:
        return depth_a < depth_b
    return a.min_samples_leaf > b.min_samples_leaf

def grid_search(X, y=None, criterion='gini', grid=None, k_folds=5, seed=0,
                n_jobs=1, verbose=False, full_output=False):
    """
    Exhaustive search of tree configurations by cross validation.

    Every combination of the grid values is scored by stratified k-fold
    mean accuracy. Among configurations with the best score (within
    1e-12), the one with the smallest max_depth, then the largest
    min_samples_leaf, then the earliest in grid order is chosen.

    Parameters
    ----------
    X : FeatureMatrix or array_like
        NxD features.
    y : array_like, optional
        Labels. Taken from `X` if it is a FeatureMatrix.
    criterion : {'gini', 'entropy'}, optional
    grid : dict, optional
        Lists of values keyed by `TreeConfig` field names (``max_depth``,
        ``min_samples_split``, ``min_samples_leaf``, ``ccp_alpha``). If
        None, use ``preset_grid('std', criterion)``.
    k_folds : int, optional
        Number of folds, at least 2.
    seed : int, optional
        Seed of the fold shuffle.
    n_jobs : int, optional
        Number of worker processes.
    verbose : bool, optional
        Flag specifying whether to print progress.
    full_output : bool, optional
        Flag specifying to return all scored candidates as well.

    Returns
    -------
    best_config : TreeConfig
    best_score : float
    candidates : list of (TreeConfig, float), only if ``full_output==True``

    Raises
    ------
    ConfigError
        If the grid is empty or names an unknown field.
    DataError
        If a class has fewer than `k_folds` samples.

    """
    X, y = _check_data(X, y)
    if grid is None:
        grid = preset_grid('std', criterion)
    for key in grid:
        if key not in TreeConfig._fields or key == 'criterion':
            raise ConfigError("unknown grid field {!r}".format(key))
    keys = sorted(grid)
    if any(len(grid[k]) == 0 for k in keys):
        raise ConfigError("grid should not be empty")
    candidates = [validate_config(
                      TreeConfig(criterion=criterion,
                                 **dict(zip(keys, values))))
                  for values in itertools.product(*[grid[k] for k in keys])]
    if len(candidates) == 0:
        raise ConfigError("grid should not be empty")

    if verbose:
        print("Scoring {} tree configurations with {}-fold cross "
              "validation...".format(len(candidates), k_folds))
    tasks = [(config, X, y, k_folds, seed) for config in candidates]
    if n_jobs > 1:
        pool = multiprocessing.Pool(n_jobs)
        try:
            scores = pool.map(_score_candidate, tasks)
        finally:
            pool.close()
            pool.join()
    else:
        scores = [_score_candidate(task) for task in tasks]

    best_config, best_score = candidates[0], scores[0]
    for config, score in zip(candidates[1:], scores[1:]):
        if score > best_score + 1e-12 \
                or (abs(score - best_score) <= 1e-12
                    and _simpler(config, best_config)):
            best_config, best_score = config, score
    if verbose:
        print("Best: {} (accuracy {:.4f})".format(best_config, best_score))

    if full_output:
        GridSearchOutput = collections.namedtuple(
            'GridSearchOutput',
            ['best_config', 'best_score', 'candidates'])
        return GridSearchOutput(best_config=best_config,
                                best_score=best_score,
                                candidates=list(zip(candidates, scores)))
    else:
        return best_config, best_score

###
# Persistence
###

def _node_dict(node):
    record = {'impurity': node.impurity,
              'n_samples': node.n_samples,
              'class_counts': list(node.class_counts),
              'predicted': node.predicted}
    if not is_leaf(node):
        record.update({'feature': node.feature,
                       'threshold': node.threshold,
                       'left': _node_dict(node.left),
                       'right': _node_dict(node.right)})
    return record

def to_dict(tree):
    """
    Recursive JSON-ready representation of a tree.

    The split criterion is stored once, on the root record.

    """
    record = _node_dict(tree)
    record['criterion'] = tree.criterion
    return record

def from_dict(record, criterion='gini'):
    criterion = record.get('criterion', criterion)
    leaf = TreeNode(feature=-1,
                    threshold=None,
                    left=None,
                    right=None,
                    impurity=float(record['impurity']),
                    n_samples=int(record['n_samples']),
                    class_counts=tuple(int(c) for c in record['class_counts']),
                    predicted=int(record['predicted']),
                    criterion=criterion)
    if 'feature' not in record:
        return leaf
    return leaf._replace(feature=int(record['feature']),
                         threshold=float(record['threshold']),
                         left=from_dict(record['left'], criterion),
                         right=from_dict(record['right'], criterion))

def save(tree, path, config=None):
    record = {'tree': to_dict(tree)}
    if config is not None:
        record['config'] = config._asdict()
    WellClass.io.write_json(record, path)

def load(path):
    return from_dict(WellClass.io.read_json(path)['tree'])
