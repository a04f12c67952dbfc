"""
Regression baseline monitor.

A ten-minute window slides over a series one minute at a time. Inside the
window, the standard deviation of each one-minute interval is computed
for two channels, typically a flex joint acceleration and a bending
moment, and the bending moment dispersions are regressed on the
acceleration dispersions. The sequence of fitted lines (intercept,
incline) characterizes the well state: lines drawn from an intact and a
broken well form two clouds in the (intercept, incline) plane.

"""

import collections
import warnings

import numpy as np
import pandas as pd
import scipy.stats

import WellClass.io
import WellClass.stats
from WellClass.errors import ConfigError, DataError

RegressionLine = collections.namedtuple(
    'RegressionLine',
    ['intercept', 'incline', 'window_start_index'])

MonitorConfig = collections.namedtuple(
    'MonitorConfig',
    ['x_channel', 'y_channel', 'window_minutes', 'step_minutes'],
    defaults=['accx_FJ', 'bmx', 10, 1])

LineDistribution = collections.namedtuple(
    'LineDistribution',
    ['mean', 'std', 'median', 'iqr', 'n_lines'])

# Determinant below which the normal equations are considered singular
SINGULAR_DET = 1e-15

def fit_line(x, y, window_start_index=0):
    """
    Ordinary least squares fit of ``y = b0 + b1 x``.

    The normal equations are solved with the explicit adjugate of the 2x2
    matrix ``[[n, sum(x)], [sum(x), sum(x^2)]]``::

        b0 = (sum(x^2) sum(y) - sum(x) sum(xy)) / det
        b1 = (n sum(xy) - sum(x) sum(y)) / det

    with ``det = n sum(x^2) - sum(x)^2``, evaluated as
    ``n sum((x - mean(x))^2)``.

    Parameters
    ----------
    x, y : array_like
        1D arrays of equal length, at least 2.
    window_start_index : int, optional
        Index stored in the returned line.

    Returns
    -------
    RegressionLine

    Raises
    ------
    DataError
        If the inputs have different or insufficient lengths, or if
        ``det < 1e-15`` (x has zero variance).

    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size != y.size:
        raise DataError("x and y should have the same length")
    n = x.size
    if n < 2:
        raise DataError("at least 2 points required to fit a line")

    sx = np.sum(x)
    sy = np.sum(y)
    sxx = np.sum(x*x)
    sxy = np.sum(x*y)
    det = n*np.sum((x - sx/n)**2)
    if det < SINGULAR_DET:
        raise DataError("singular normal equations (det={:g})".format(det))
    b0 = (sxx*sy - sx*sxy) / det
    b1 = (n*sxy - sx*sy) / det
    return RegressionLine(intercept=float(b0),
                          incline=float(b1),
                          window_start_index=int(window_start_index))

def fit_line_moments(x, y):
    """
    Least squares line from moments: ``b1 = Cov(x,y)/Var(x)``,
    ``b0 = mean(y) - mean(x) b1``.

    Returns
    -------
    tuple
        ``(b0, b1)``

    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    x_mean = np.mean(x)
    y_mean = np.mean(y)
    var_x = np.mean((x - x_mean)**2)
    if var_x*x.size*x.size < SINGULAR_DET:
        raise DataError("x has zero variance")
    b1 = np.mean((x - x_mean)*(y - y_mean)) / var_x
    return y_mean - x_mean*b1, b1

def validate_monitor_config(config, channels=None):
    """
    Check a `MonitorConfig`, optionally against the channels of a series.

    Raises
    ------
    ConfigError
        If the channels are equal or missing, or if the window and step
        do not satisfy ``window_minutes > step_minutes >= 1``.

    """
    if config.x_channel == config.y_channel:
        raise ConfigError("x_channel and y_channel should be distinct")
    if channels is not None:
        for field in ('x_channel', 'y_channel'):
            if getattr(config, field) not in channels:
                raise ConfigError("{} {!r} not in series channels {}".format(
                    field, getattr(config, field), channels))
    if int(config.step_minutes) < 1:
        raise ConfigError("step_minutes should be at least 1")
    if int(config.window_minutes) <= int(config.step_minutes):
        raise ConfigError("window_minutes should be larger than "
                          "step_minutes")
    return config

def minute_std(series, config=None):
    """
    Per-minute sample standard deviation of the monitored channels.

    Returns
    -------
    numpy array
        (n_minutes, 2) array with the x and y channel dispersions.

    """
    if config is None:
        config = MonitorConfig()
    samples_per_minute = int(round(60.*series.sample_rate_hz))
    return WellClass.stats.block_std(series,
                                     samples_per_minute,
                                     channels=[config.x_channel,
                                               config.y_channel])

def iter_lines(series, config=None, gaps=None):
    """
    Generate regression lines over a series, in time order.

    Windows whose normal equations are singular are skipped with a
    warning. Their start index is appended to `gaps` if given.

    Parameters
    ----------
    series : SeriesData
        Series to monitor.
    config : MonitorConfig, optional
        Monitor configuration. Default ``MonitorConfig()``.
    gaps : list, optional
        List to which the start index of skipped windows is appended.

    Yields
    ------
    RegressionLine
        One line per window. ``window_start_index`` is the sample index at
        which the window starts.

    """
    if config is None:
        config = MonitorConfig()
    validate_monitor_config(config, series.channels)
    samples_per_minute = int(round(60.*series.sample_rate_hz))
    n_minutes = series.shape[0] // samples_per_minute
    window = int(config.window_minutes)
    step = int(config.step_minutes)
    if n_minutes < window:
        raise DataError("series of {} minutes is shorter than the {} minute "
                        "window".format(n_minutes, window))

    dispersion = minute_std(series, config)
    for k in range(0, n_minutes - window + 1, step):
        start = k*samples_per_minute
        x = dispersion[k:k + window, 0]
        y = dispersion[k:k + window, 1]
        try:
            yield fit_line(x, y, window_start_index=start)
        except DataError as e:
            warnings.warn("window starting at sample {} skipped: {}".format(
                start, e))
            if gaps is not None:
                gaps.append(start)

def monitor(series, config=None, full_output=False):
    """
    Slide the regression window over a series.

    Parameters
    ----------
    series : SeriesData
        Series to monitor. Must span at least ``window_minutes``.
    config : MonitorConfig, optional
        Monitor configuration. Default ``MonitorConfig()``.
    full_output : bool, optional
        Flag specifying to return additional outputs. If true, the outputs
        are given as a namedtuple.

    Returns
    -------
    lines : list of RegressionLine
        ``n_minutes - window_minutes + 1`` lines at a one-minute step,
        minus skipped windows.
    gaps : list of int, only if ``full_output==True``
        Start indices of skipped windows.
    minute_std : numpy array, only if ``full_output==True``
        Per-minute dispersions of the x and y channels.

    Raises
    ------
    ConfigError
        If `config` is invalid for `series`.
    DataError
        If the series is shorter than the window.

    """
    if config is None:
        config = MonitorConfig()
    gaps = []
    lines = list(iter_lines(series, config, gaps=gaps))

    if full_output:
        MonitorOutput = collections.namedtuple(
            'MonitorOutput',
            ['lines', 'gaps', 'minute_std'])
        return MonitorOutput(lines=lines,
                             gaps=gaps,
                             minute_std=minute_std(series, config))
    else:
        return lines

def line_distribution(lines):
    """
    Summarize a cloud of regression lines.

    Parameters
    ----------
    lines : list of RegressionLine

    Returns
    -------
    LineDistribution
        Component-wise mean, population std, median and interquartile
        range of (intercept, incline), and the number of lines.

    Raises
    ------
    DataError
        If `lines` is empty.

    """
    if len(lines) == 0:
        raise DataError("no lines to summarize")
    params = np.array([[l.intercept, l.incline] for l in lines])
    return LineDistribution(mean=np.mean(params, axis=0),
                            std=np.std(params, axis=0),
                            median=np.median(params, axis=0),
                            iqr=scipy.stats.iqr(params, axis=0),
                            n_lines=len(lines))

def line_clouds(series_set, config=None):
    """
    Monitor every series of a labelled set.

    Returns
    -------
    DataFrame
        One row per line, with columns ``source_index``, ``label``,
        ``window_start``, ``intercept`` and ``incline``.

    """
    rows = []
    for source_index, (series, label) in enumerate(series_set.items):
        for line in monitor(series, config):
            rows.append((source_index, label, line.window_start_index,
                         line.intercept, line.incline))
    return pd.DataFrame(rows, columns=['source_index', 'label',
                                       'window_start', 'intercept',
                                       'incline'])

###
# Persistence
###

def lines_table(lines):
    return pd.DataFrame(
        [(l.window_start_index, l.intercept, l.incline) for l in lines],
        columns=['window_start', 'intercept', 'incline'])

def write_lines(lines, path, append=False):
    """
    Write regression lines as CSV (window_start, intercept, incline).

    With ``append=True`` rows are appended to an existing file, so that a
    monitor running over a growing series can keep a single table.

    """
    table = lines_table(lines)
    if append:
        WellClass.io.append_table(table, path)
    else:
        table.to_csv(path, index=False)

def read_lines(path):
    try:
        table = pd.read_csv(path)
    except FileNotFoundError:
        raise DataError("lines file {} not found".format(path))
    return [RegressionLine(intercept=float(row.intercept),
                           incline=float(row.incline),
                           window_start_index=int(row.window_start))
            for row in table.itertuples(index=False)]
