"""
Functions for transforming time series segments into dispersion features.

All segment transformations are of the following form::

    features = transform_fxn(segment, channels)

where `segment` is an n_wxm SeriesData object or numpy array holding one
window of m channels, `channels` selects the channels to use, and
`features` is a 1D array. The template function `transform` applies one
of them to a list of segments and assembles a `FeatureMatrix`.

Two transformations are provided:

- STD: the sample standard deviation of each channel (m features).
- COV: the upper triangle, row by row with the diagonal first, of the
  square root of the channel covariance matrix (m(m+1)/2 features).

"""

import collections

import numpy as np
import pandas as pd

import WellClass.stats
import WellClass.linalg
import WellClass.dataset
from WellClass.errors import ConfigError, DataError

FeatureMatrix = collections.namedtuple(
    'FeatureMatrix',
    ['values', 'feature_names', 'labels'])

def _channel_names(segment, channels):
    if hasattr(segment, 'channels'):
        names = segment.channels
    else:
        names = ['ch{}'.format(i) for i in range(np.shape(segment)[1])]
    if channels is None:
        return list(names)
    if hasattr(segment, '_name_to_index'):
        idx = segment._name_to_index(list(channels))
    else:
        idx = list(channels)
    return [names[i] for i in idx]

def _select(segment, channels):
    if channels is None:
        data = np.asarray(segment, dtype=np.float64)
    else:
        data = np.asarray(segment[:, list(channels)], dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 2:
        raise DataError("segment should have at least 2 samples, got shape "
                        "{}".format(data.shape))
    return data

def std_transform(segment, channels=None):
    """
    Per-channel sample standard deviation of a segment.

    Parameters
    ----------
    segment : SeriesData or numpy array
        n_wxm segment, with n_w >= 2.
    channels : list of int or list of str, optional
        Channels to use. If None, use all channels.

    Returns
    -------
    numpy array
        Standard deviation (divisor n_w-1) of each channel.

    Raises
    ------
    DataError
        If the segment has fewer than 2 samples.

    """
    return WellClass.stats.std(_select(segment, channels))

def cov_matrix(segment, channels=None):
    """
    Sample covariance matrix of the mean-centered channels of a segment.

    See `std_transform` for a description of the parameters. The diagonal
    equals the squared `std_transform`.

    """
    return WellClass.stats.cov(_select(segment, channels))

def cov_sqrt(sigma):
    """
    Symmetric positive semi-definite square root of a covariance matrix.

    Eigenvalues between -1e-10 and 0 are clamped to 0.

    Raises
    ------
    DataError
        If `sigma` has an eigenvalue below -1e-10.

    """
    return WellClass.linalg.sym_sqrt(sigma, tol=1e-10)

def correlation(sigma):
    """
    Correlation matrix of a covariance matrix.

    Computes ``diag(sigma)^(-1/2) sigma diag(sigma)^(-1/2)``. The diagonal
    is set to exactly 1 and off-diagonal entries are clipped to [-1, 1].

    Raises
    ------
    DataError
        If a diagonal entry is not positive.

    """
    sigma = np.asarray(sigma, dtype=np.float64)
    d = np.diag(sigma)
    if np.any(d <= 0):
        raise DataError("correlation requires positive variances, got "
                        "{}".format(d.tolist()))
    inv_sqrt = 1. / np.sqrt(d)
    corr = sigma * np.outer(inv_sqrt, inv_sqrt)
    corr = np.clip(corr, -1., 1.)
    np.fill_diagonal(corr, 1.)
    return corr

def cov_transform(segment, channels=None):
    """
    Upper triangle of the square root of a segment's covariance matrix.

    Entries are taken row by row, diagonal first, i.e. in the order of
    ``numpy.triu_indices``. See `std_transform` for a description of the
    parameters.

    Returns
    -------
    numpy array
        m(m+1)/2 features.

    """
    r = cov_sqrt(cov_matrix(segment, channels))
    return r[np.triu_indices(r.shape[0])]

def feature_names(kind, channel_names):
    """
    Names of the features produced by a transformation.

    STD features are named after their channel. COV features are named
    ``sqrtcov(ci,cj)``.

    """
    if kind == 'std':
        return list(channel_names)
    elif kind == 'cov':
        rows, cols = np.triu_indices(len(channel_names))
        return ['sqrtcov({},{})'.format(channel_names[i], channel_names[j])
                for i, j in zip(rows, cols)]
    else:
        raise ConfigError("transform kind should be 'std' or 'cov', got "
                          "{!r}".format(kind))

TRANSFORMS = {'std': std_transform, 'cov': cov_transform}

def transform(segments, kind='std', channels=None):
    """
    Apply a transformation to a list of segments.

    This function is a template transformation function. It resolves the
    channel selection, applies the transformation function to every
    segment, and assembles the feature matrix with its names and labels.

    Parameters
    ----------
    segments : list of Segment
        Segments to transform.
    kind : {'std', 'cov'}, optional
        Transformation to apply.
    channels : None, 'all', 'x', 'y' or list of str, optional
        Channels to use. 'x' and 'y' select the channels of one physical
        direction.

    Returns
    -------
    FeatureMatrix
        Namedtuple with fields ``values`` (NxD), ``feature_names`` and
        ``labels``.

    Raises
    ------
    DataError
        If `segments` is empty, or if a segment has fewer than 2 samples.

    """
    if kind not in TRANSFORMS:
        raise ConfigError("transform kind should be 'std' or 'cov', got "
                          "{!r}".format(kind))
    if len(segments) == 0:
        raise DataError("no segments to transform")
    channels = WellClass.dataset.resolve_channels(channels)
    transform_fxn = TRANSFORMS[kind]

    values = np.array([transform_fxn(s.samples, channels) for s in segments])
    names = feature_names(kind, _channel_names(segments[0].samples, channels))
    labels = np.array([s.label for s in segments], dtype=int)
    if not np.all(np.isfinite(values)):
        raise DataError("non-finite feature values")
    return FeatureMatrix(values=values,
                         feature_names=tuple(names),
                         labels=labels)

###
# Persistence
###

def write_features(features, path):
    """
    Write a FeatureMatrix as CSV, with a trailing ``label`` column.

    """
    table = pd.DataFrame(np.asarray(features.values),
                         columns=list(features.feature_names))
    table['label'] = np.asarray(features.labels, dtype=int)
    table.to_csv(path, index=False)

def read_features(path):
    """
    Read a FeatureMatrix written by `write_features`.

    Raises
    ------
    DataError
        If the file does not exist or has no ``label`` column.

    """
    try:
        table = pd.read_csv(path)
    except FileNotFoundError:
        raise DataError("feature file {} not found".format(path))
    if 'label' not in table.columns:
        raise DataError("feature file {} has no label column".format(path))
    labels = table.pop('label').values.astype(int)
    values = table.values.astype(np.float64)
    if not np.all(np.isfinite(values)):
        raise DataError("feature file {} has non-finite values".format(path))
    return FeatureMatrix(values=values,
                         feature_names=tuple(table.columns),
                         labels=labels)
