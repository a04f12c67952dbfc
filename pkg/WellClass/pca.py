"""
Principal component analysis of feature matrices.

The model normalizes each feature with the training mean and population
standard deviation, computes the covariance ``X^T X / N`` of the
normalized features, and projects onto the eigenvectors with the largest
eigenvalues. Eigenvector signs are fixed so that the largest-magnitude
coordinate of each component is positive, which makes fitted models
reproducible.

"""

import collections

import numpy as np

import WellClass.io
import WellClass.linalg
from WellClass.errors import ConfigError, DataError

class PcaModel(collections.namedtuple(
        'PcaModel',
        ['mean', 'std', 'eigenvalues', 'eigenvectors', 'd'])):
    """
    Fitted principal component model.

    Attributes
    ----------
    mean, std : numpy array
        Normalization statistics of the training features.
    eigenvalues : numpy array
        Full eigenvalue spectrum of the normalized covariance, sorted in
        non-increasing order.
    eigenvectors : numpy array
        d_inxd_in matrix with the orthonormal eigenvectors as columns.
    d : int
        Number of retained components.
    components : numpy array
        d_inxd projection matrix (the first `d` eigenvectors).

    """
    __slots__ = ()

    @property
    def components(self):
        return self.eigenvectors[:, :self.d]

def _values(X):
    return np.asarray(X.values if hasattr(X, 'feature_names') else X,
                      dtype=np.float64)

def fit(X, d):
    """
    Fit a principal component model.

    Parameters
    ----------
    X : FeatureMatrix or array_like
        NxD_in training features.
    d : int
        Number of components to retain, ``1 <= d <= D_in``.

    Returns
    -------
    PcaModel

    Raises
    ------
    ConfigError
        If `d` is out of range.
    DataError
        If `X` has fewer than 2 rows or non-finite values.

    """
    values = _values(X)
    if values.ndim != 2 or values.shape[0] < 2:
        raise DataError("at least 2 samples required to fit PCA")
    if not np.all(np.isfinite(values)):
        raise DataError("features contain non-finite values")
    n, d_in = values.shape
    if not 1 <= d <= d_in:
        raise ConfigError("number of components should be in [1, {}], got "
                          "{}".format(d_in, d))

    mu = np.mean(values, axis=0)
    sigma = np.std(values, axis=0)
    sigma[sigma <= 1e-12] = 1.
    normalized = (values - mu) / sigma
    cov = np.dot(normalized.T, normalized) / n
    eigenvalues, eigenvectors = WellClass.linalg.jacobi_eigh(0.5*(cov + cov.T))

    # Sign convention
    for j in range(d_in):
        i = np.argmax(np.abs(eigenvectors[:, j]))
        if eigenvectors[i, j] < 0:
            eigenvectors[:, j] = -eigenvectors[:, j]

    return PcaModel(mean=mu,
                    std=sigma,
                    eigenvalues=eigenvalues,
                    eigenvectors=eigenvectors,
                    d=int(d))

def normalize(model, X):
    """
    Normalize features with the model's training statistics.

    """
    values = _values(X)
    if values.ndim != 2 or values.shape[1] != model.mean.size:
        raise DataError("expected {} feature columns, got shape {}".format(
            model.mean.size, values.shape))
    return (values - model.mean) / model.std

def project(model, X):
    """
    Project features onto the retained principal components.

    Parameters
    ----------
    model : PcaModel
        Fitted model.
    X : FeatureMatrix or array_like
        NxD_in features.

    Returns
    -------
    FeatureMatrix or numpy array
        Nxd projection ``((X - mean) / std) W``. If `X` is a FeatureMatrix
        the output is one too, with features named ``PC1``..``PCd``.

    Raises
    ------
    DataError
        If the number of columns does not match the model.

    """
    projected = np.dot(normalize(model, X), model.components)
    if hasattr(X, 'feature_names'):
        return X._replace(values=projected,
                          feature_names=tuple('PC{}'.format(i + 1)
                                              for i in range(model.d)))
    return projected

def explained_variance_ratio(model):
    """
    Fraction of the total variance explained by each component.

    Negative round-off eigenvalues are clipped to zero.

    Returns
    -------
    numpy array
        D_in non-negative, non-increasing ratios summing to 1.

    Raises
    ------
    DataError
        If the eigenvalue spectrum is all zero.

    """
    eigenvalues = np.clip(model.eigenvalues, 0., None)
    total = np.sum(eigenvalues)
    if not total > 0:
        raise DataError("explained variance undefined for a zero spectrum")
    return eigenvalues / total

def cumulative_explained_variance_ratio(model):
    """
    Cumulative sum of `explained_variance_ratio`.

    """
    return np.cumsum(explained_variance_ratio(model))

def n_components_for(model, ratio):
    """
    Smallest number of components explaining at least `ratio` of the
    variance.

    """
    if not 0 < ratio <= 1:
        raise ConfigError("ratio should be in (0, 1]")
    cumulative = cumulative_explained_variance_ratio(model)
    return int(np.searchsorted(cumulative, ratio - 1e-12) + 1)

###
# Persistence
###

def to_dict(model):
    """
    JSON-ready representation. Components are stored row-major.

    """
    return {'mean': model.mean,
            'std': model.std,
            'eigenvalues': model.eigenvalues,
            'eigenvectors': model.eigenvectors,
            'components': model.components,
            'd': model.d}

def from_dict(record):
    return PcaModel(mean=np.array(record['mean'], dtype=np.float64),
                    std=np.array(record['std'], dtype=np.float64),
                    eigenvalues=np.array(record['eigenvalues'],
                                         dtype=np.float64),
                    eigenvectors=np.array(record['eigenvectors'],
                                          dtype=np.float64),
                    d=int(record['d']))

def save(model, path):
    WellClass.io.write_json(to_dict(model), path)

def load(path):
    return from_dict(WellClass.io.read_json(path))
