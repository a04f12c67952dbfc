"""
Functions to calculate statistics from the samples in a SeriesData object.

Dispersion statistics (`std`, `var`, `cov`, `block_std`) use the sample
divisor n-1, the convention shared by the feature transforms and the
baseline monitor.

"""

import numpy as np
import scipy.stats

from WellClass.errors import DataError

def _slice(data, channels):
    # Slice data to take statistics from
    if channels is None:
        return np.asarray(data)
    else:
        return np.asarray(data[:, channels])

def mean(data, channels=None):
    """
    Calculate the mean of the samples in a SeriesData object.

    Parameters
    ----------
    data : SeriesData or numpy array
        nxm time series where n is the number of samples and m is the
        number of channels.
    channels : int or str or list of int or list of str, optional
        Channels on which to calculate the statistic. If None, use all
        channels.

    Returns
    -------
    float or numpy array
        The mean of the samples in the specified channels of `data`.

    """
    return np.mean(_slice(data, channels), axis=0)

def median(data, channels=None):
    """
    Calculate the median of the samples in a SeriesData object.

    Parameters
    ----------
    data : SeriesData or numpy array
        nxm time series where n is the number of samples and m is the
        number of channels.
    channels : int or str or list of int or list of str, optional
        Channels on which to calculate the statistic. If None, use all
        channels.

    Returns
    -------
    float or numpy array
        The median of the samples in the specified channels of `data`.

    """
    return np.median(_slice(data, channels), axis=0)

def std(data, channels=None, ddof=1):
    """
    Calculate the standard deviation of the samples in a SeriesData object.

    Parameters
    ----------
    data : SeriesData or numpy array
        nxm time series where n is the number of samples and m is the
        number of channels.
    channels : int or str or list of int or list of str, optional
        Channels on which to calculate the statistic. If None, use all
        channels.
    ddof : int, optional
        Delta degrees of freedom. The default computes the sample standard
        deviation (divisor n-1).

    Returns
    -------
    float or numpy array
        The standard deviation of the samples in the specified channels of
        `data`.

    Raises
    ------
    DataError
        If `data` has fewer than ``ddof + 1`` samples.

    """
    data_stats = _slice(data, channels)
    if data_stats.shape[0] < ddof + 1:
        raise DataError("at least {} samples required, got {}".format(
            ddof + 1, data_stats.shape[0]))
    return np.std(data_stats, axis=0, ddof=ddof)

def var(data, channels=None, ddof=1):
    """
    Calculate the variance of the samples in a SeriesData object.

    See `std` for a description of the parameters.

    """
    data_stats = _slice(data, channels)
    if data_stats.shape[0] < ddof + 1:
        raise DataError("at least {} samples required, got {}".format(
            ddof + 1, data_stats.shape[0]))
    return np.var(data_stats, axis=0, ddof=ddof)

def cov(data, channels=None):
    """
    Calculate the sample covariance matrix of a SeriesData object.

    Channels are mean-centered before the product, and the divisor is
    n-1.

    Parameters
    ----------
    data : SeriesData or numpy array
        nxm time series where n is the number of samples and m is the
        number of channels.
    channels : int or str or list of int or list of str, optional
        Channels on which to calculate the statistic. If None, use all
        channels.

    Returns
    -------
    numpy array
        mxm symmetric covariance matrix.

    Raises
    ------
    DataError
        If `data` has fewer than 2 samples.

    """
    data_stats = _slice(data, channels)
    if data_stats.ndim == 1:
        data_stats = data_stats[:, np.newaxis]
    n = data_stats.shape[0]
    if n < 2:
        raise DataError("at least 2 samples required, got {}".format(n))
    centered = data_stats - np.mean(data_stats, axis=0)
    sigma = np.dot(centered.T, centered) / (n - 1)
    # Exact symmetry
    return 0.5*(sigma + sigma.T)

def iqr(data, channels=None):
    """
    Calculate the interquartile range of the samples in a SeriesData
    object.

    Parameters
    ----------
    data : SeriesData or numpy array
        nxm time series where n is the number of samples and m is the
        number of channels.
    channels : int or str or list of int or list of str, optional
        Channels on which to calculate the statistic. If None, use all
        channels.

    Returns
    -------
    float or numpy array
        The interquartile range of the samples in the specified channels of
        `data`.

    """
    return scipy.stats.iqr(_slice(data, channels), axis=0)

def block_std(data, block_len, channels=None):
    """
    Calculate the sample standard deviation over consecutive blocks.

    The series is split into ``n // block_len`` non-overlapping blocks of
    `block_len` samples, starting at the first sample. Trailing samples
    that do not fill a block are ignored.

    Parameters
    ----------
    data : SeriesData or numpy array
        nxm time series.
    block_len : int
        Number of samples per block. Must be at least 2.
    channels : int or str or list of int or list of str, optional
        Channels on which to calculate the statistic. If None, use all
        channels.

    Returns
    -------
    numpy array
        Array of shape (n_blocks, m), or (n_blocks,) if a single channel
        was selected.

    """
    if block_len < 2:
        raise DataError("block_len should be at least 2")
    data_stats = _slice(data, channels)
    n_blocks = data_stats.shape[0] // block_len
    if n_blocks < 1:
        raise DataError("series shorter than one block ({} < {})".format(
            data_stats.shape[0], block_len))
    blocks = data_stats[:n_blocks*block_len].reshape(
        (n_blocks, block_len) + data_stats.shape[1:])
    return np.std(blocks, axis=1, ddof=1)
