"""
`WellClass`: Classification of wellhead sensor time series into intact
and broken well states.

"""

# Versions should comply with PEP440.  For a discussion on single-sourcing
# the version across setup.py and the project code, see
# https://packaging.python.org/en/latest/single_source_version.html
__version__ = '0.1.0'

from . import errors
from . import io
from . import stats
from . import linalg
from . import dataset
from . import transform
from . import pca
from . import baseline
from . import logreg
from . import evaluate
from . import dtree
from . import svm
from . import cnn
from . import plot
from . import cli
