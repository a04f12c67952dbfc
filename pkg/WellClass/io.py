"""
Classes and utility functions for reading and writing WellClass data.

Multichannel sensor recordings are represented by `SeriesData`, a numpy
array subclass that carries the channel names and the sample rate, and
that can be indexed by channel name. The remaining functions implement
the on-disk formats used throughout the package:

- Series: CSV with one column per channel (header = channel names) and a
  JSON sidecar with the label, noise level, sample rate and seed.
- Tables (features, regression lines, reports): CSV written with pandas.
- Models: JSON documents, or a flat binary of named float64 tensors plus
  a JSON manifest for the convolutional network.

"""

import os
import copy
import collections
import json

import numpy as np
import pandas as pd

from WellClass.errors import DataError

# Channel names of the three simulated sensors, x and y directions
DEFAULT_CHANNELS = ('accx_FJ', 'accy_FJ', 'accx_DAS', 'accy_DAS', 'bmx', 'bmy')

###
# Series container
###

class SeriesData(np.ndarray):
    """
    Object containing a multichannel time series.

    A `SeriesData` object is an nxm numpy array representing n time steps
    of m channels, sampled at a constant rate. Indexing along the second
    axis can be performed by channel name, which allows to easily select
    data from one or several channels. Otherwise, a `SeriesData` object can
    be treated as a numpy array for most purposes.

    `SeriesData` objects are read-only after construction. Slices share
    memory with their parent and are read-only as well.

    Parameters
    ----------
    samples : array_like
        nxm array of channel samples. Must contain at least two time steps,
        at least one channel, and finite values only.
    sample_rate_hz : float, optional
        Sampling rate in Hz.
    channels : list of str, optional
        Name of each channel. If None, use `DEFAULT_CHANNELS` if m is 6,
        and ``ch0, ch1, ...`` otherwise.

    Attributes
    ----------
    channels : tuple
        The name of the channels contained in `SeriesData`.
    sample_rate_hz : float
        Sampling rate in Hz.
    duration : float
        Length of the series in seconds (n / sample_rate_hz).

    Raises
    ------
    DataError
        If `samples` is not a 2D array with n >= 2 and m >= 1, if it
        contains non-finite values, or if the number of channel names does
        not match m.
    DataError
        If `sample_rate_hz` is not positive.

    Examples
    --------
    >>> import numpy as np
    >>> import WellClass
    >>> s = WellClass.io.SeriesData(np.random.randn(18001, 6))
    >>> s.channels
    ('accx_FJ', 'accy_FJ', 'accx_DAS', 'accy_DAS', 'bmx', 'bmy')

    Retain only the bending moments

    >>> s_bm = s[:, ['bmx', 'bmy']]
    >>> s_bm.channels
    ('bmx', 'bmy')

    """

    def __new__(cls, samples, sample_rate_hz=5.0, channels=None):
        data = np.array(samples, dtype=np.float64)
        if data.ndim != 2:
            raise DataError("series samples should be a 2D array, got {} "
                            "dimension(s)".format(data.ndim))
        n, m = data.shape
        if n < 2 or m < 1:
            raise DataError("series should have at least 2 samples and 1 "
                            "channel, got shape {}".format(data.shape))
        if not np.all(np.isfinite(data)):
            raise DataError("series contains non-finite values")
        if not sample_rate_hz > 0:
            raise DataError("sample_rate_hz should be positive")

        if channels is None:
            if m == len(DEFAULT_CHANNELS):
                channels = DEFAULT_CHANNELS
            else:
                channels = ['ch{}'.format(i) for i in range(m)]
        channels = tuple(str(ch) for ch in channels)
        if len(channels) != m:
            raise DataError("{} channel names given for {} channels"
                            .format(len(channels), m))
        if len(set(channels)) != m:
            raise DataError("duplicated channel names: {}".format(channels))

        obj = data.view(cls)
        obj._channels = channels
        obj._sample_rate_hz = float(sample_rate_hz)
        obj.flags.writeable = False
        return obj

    def __array_finalize__(self, obj):
        # Views and slices inherit channel names and sample rate
        if obj is None:
            return
        self._channels = copy.deepcopy(getattr(obj, '_channels', None))
        self._sample_rate_hz = getattr(obj, '_sample_rate_hz', None)

    # Pickling support, so that series survive multiprocessing transfers
    def __reduce__(self):
        state = super(SeriesData, self).__reduce__()
        return (state[0],
                state[1],
                state[2] + (self._channels, self._sample_rate_hz))

    def __setstate__(self, state):
        self._channels = state[-2]
        self._sample_rate_hz = state[-1]
        super(SeriesData, self).__setstate__(state[:-2])

    ###
    # Properties
    ###

    @property
    def channels(self):
        """
        The name of the channels contained in `SeriesData`.

        """
        return self._channels

    @property
    def sample_rate_hz(self):
        """
        Sampling rate in Hz.

        """
        return self._sample_rate_hz

    @property
    def duration(self):
        """
        Length of the series in seconds.

        """
        return self.shape[0] / self._sample_rate_hz

    def _name_to_index(self, channels):
        """
        Translate channel names into column indices.

        Parameters
        ----------
        channels : int, str or iterable of int or str
            Channel names, or column indices within
            ``-len(self.channels)..len(self.channels) - 1``.

        Returns
        -------
        int or list of int

        """
        if isinstance(channels, str):
            if channels not in self.channels:
                raise DataError("unknown channel {!r}, available: {}".format(
                    channels, self.channels))
            return self.channels.index(channels)

        if isinstance(channels, (int, np.integer)):
            n = len(self.channels)
            if not -n <= channels < n:
                raise DataError("channel index {} out of range for {} "
                                "channels".format(channels, n))
            return int(channels)

        if hasattr(channels, '__iter__'):
            return [self._name_to_index(ch) for ch in channels]

        raise TypeError("channels should be given as names or indices, got "
                        "{}".format(type(channels).__name__))

    def __getitem__(self, key):
        """
        Index samples and channels.

        The channel part of a ``(rows, channels)`` key may use channel
        names. Two-dimensional results keep the matching channel names;
        anything else is returned as a plain numpy array.

        """
        if isinstance(key, tuple) and len(key) == 2 \
            and key[0] is not None and key[1] is not None:
            rows, cols = key
            if not isinstance(cols, slice):
                cols = self._name_to_index(cols)

            out = np.ndarray.__getitem__(self, (rows, cols))
            if not isinstance(out, np.ndarray):
                return out
            if out.ndim != 2:
                return out.view(np.ndarray)
            if isinstance(cols, slice):
                out._channels = self._channels[cols]
            else:
                out._channels = tuple(self._channels[c] for c in cols)
            return out

        out = np.ndarray.__getitem__(self, key)
        if isinstance(out, SeriesData) and out.ndim != 2:
            return out.view(np.ndarray)
        return out

    def __str__(self):
        """
        Return a short description of the series.

        """
        return "SeriesData({} samples x {} channels @ {:g} Hz)".format(
            self.shape[0], self.shape[1], self._sample_rate_hz)

###
# Series files
###

def sidecar_path(path):
    """
    Return the path of the JSON sidecar belonging to a series CSV file.

    """
    return os.path.splitext(path)[0] + '.json'

def write_series(series, path, label=None, noise_level=None, seed=None):
    """
    Write a series to a CSV file plus a JSON sidecar.

    Parameters
    ----------
    series : SeriesData
        Series to write.
    path : str
        Path of the CSV file. The sidecar is written next to it, with the
        extension replaced by ``.json``.
    label : int, optional
        Class label of the series (0 intact, 1 broken).
    noise_level : int, optional
        Noise multiplier the series was generated with.
    seed : int, optional
        Seed the series was generated with.

    """
    table = pd.DataFrame(np.asarray(series), columns=list(series.channels))
    table.to_csv(path, index=False)
    write_json({'label': label,
                'noise_level': noise_level,
                'sample_rate_hz': series.sample_rate_hz,
                'seed': seed},
               sidecar_path(path))

def read_series(path, full_output=False):
    """
    Read a series from a CSV file and its JSON sidecar.

    Parameters
    ----------
    path : str
        Path of the CSV file.
    full_output : bool, optional
        Flag specifying to return the sidecar contents too. If true, the
        outputs are given as a namedtuple.

    Returns
    -------
    series : SeriesData
        The series. The sample rate is taken from the sidecar.
    label, noise_level, seed : only if ``full_output==True``
        Contents of the sidecar.

    Raises
    ------
    DataError
        If the CSV file or its sidecar do not exist, or if the contents
        are not a valid series.

    """
    if not os.path.exists(path):
        raise DataError("series file {} not found".format(path))
    meta_path = sidecar_path(path)
    if not os.path.exists(meta_path):
        raise DataError("sidecar {} of series {} not found"
                        .format(meta_path, path))
    table = pd.read_csv(path)
    meta = read_json(meta_path)
    series = SeriesData(table.values,
                        sample_rate_hz=meta['sample_rate_hz'],
                        channels=list(table.columns))

    if full_output:
        ReadSeriesOutput = collections.namedtuple(
            'ReadSeriesOutput',
            ['series', 'label', 'noise_level', 'seed'])
        return ReadSeriesOutput(series=series,
                                label=meta.get('label'),
                                noise_level=meta.get('noise_level'),
                                seed=meta.get('seed'))
    else:
        return series

###
# JSON, tables and tensors
###

def to_builtin(obj):
    """
    Recursively convert numpy containers and scalars to python builtins.

    """
    if isinstance(obj, dict):
        return {str(k): to_builtin(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_builtin(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_builtin(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj

def write_json(obj, path):
    """
    Write a JSON document, converting numpy values to builtins.

    Keys are sorted so that equal objects produce byte-identical files.

    """
    with open(path, 'w') as f:
        json.dump(to_builtin(obj), f, indent=2, sort_keys=True)
        f.write('\n')

def read_json(path):
    """
    Read a JSON document.

    """
    if not os.path.exists(path):
        raise DataError("file {} not found".format(path))
    with open(path, 'r') as f:
        return json.load(f)

def write_jsonl(records, path):
    """
    Write a list of dictionaries as JSON lines.

    """
    with open(path, 'w') as f:
        for record in records:
            f.write(json.dumps(to_builtin(record), sort_keys=True))
            f.write('\n')

def read_jsonl(path):
    """
    Read a JSON lines file as a list of dictionaries.

    """
    if not os.path.exists(path):
        raise DataError("file {} not found".format(path))
    with open(path, 'r') as f:
        return [json.loads(line) for line in f if line.strip()]

def append_table(table, path):
    """
    Append the rows of a DataFrame to a CSV file.

    The header is only written when the file does not exist yet, so that
    several writers appending in turn produce a single table.

    """
    table.to_csv(path,
                 mode='a',
                 header=not os.path.exists(path),
                 index=False)

def write_tensors(tensors, path_prefix, extra=None):
    """
    Write named float64 tensors to a flat binary file plus a manifest.

    The binary file ``<path_prefix>.bin`` holds the little-endian float64
    values of every tensor, concatenated in order. The manifest
    ``<path_prefix>.json`` lists the name, shape and offset (in values)
    of each tensor, along with the contents of `extra`.

    Parameters
    ----------
    tensors : OrderedDict
        Mapping from tensor name to array.
    path_prefix : str
        Path of the output files, without extension.
    extra : dict, optional
        Additional entries for the manifest.

    """
    entries = []
    offset = 0
    with open(path_prefix + '.bin', 'wb') as f:
        for name, tensor in tensors.items():
            values = np.ascontiguousarray(tensor, dtype='<f8')
            values.tofile(f)
            entries.append({'name': name,
                            'shape': list(values.shape),
                            'offset': offset})
            offset += values.size
    manifest = {'dtype': 'float64-le', 'tensors': entries}
    if extra is not None:
        manifest.update(extra)
    write_json(manifest, path_prefix + '.json')

def read_tensors(path_prefix):
    """
    Read tensors written by `write_tensors`.

    Returns
    -------
    tensors : OrderedDict
        Mapping from tensor name to array.
    manifest : dict
        The full manifest, including extra entries.

    """
    manifest = read_json(path_prefix + '.json')
    if not os.path.exists(path_prefix + '.bin'):
        raise DataError("file {}.bin not found".format(path_prefix))
    flat = np.fromfile(path_prefix + '.bin', dtype='<f8')
    tensors = collections.OrderedDict()
    for entry in manifest['tensors']:
        shape = tuple(entry['shape'])
        size = int(np.prod(shape)) if shape else 1
        values = flat[entry['offset']:entry['offset'] + size]
        if values.size != size:
            raise DataError("tensor {} truncated in {}.bin"
                            .format(entry['name'], path_prefix))
        tensors[entry['name']] = values.reshape(shape).astype(np.float64)
    return tensors, manifest

def write_workbook(filename, table_list, column_width=None):
    """
    Write DataFrames as the sheets of an Excel workbook.

    Parameters
    ----------
    filename : str
    table_list : list of ``(sheet_name, DataFrame)`` tuples
    column_width : int, optional
        Width of every column. If None, each column is as wide as its
        longest entry or header.

    """
    with pd.ExcelWriter(filename, engine='xlsxwriter') as writer:
        for sheet_name, df in table_list:
            df.to_excel(writer, sheet_name=sheet_name, index=False)
            sheet = writer.sheets[sheet_name]
            if column_width is None:
                for i, (name, column) in enumerate(df.items()):
                    width = column.astype(str).str.len().max()
                    if pd.isnull(width):
                        width = 0
                    sheet.set_column(i, i, width=float(max(len(str(name)),
                                                           width)))
            else:
                sheet.set_column(0, len(df.columns) - 1, width=column_width)
