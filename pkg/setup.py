#!/usr/bin/python

# setuptools setup module.
#
# Based on setup.py on https://github.com/pypa/sampleproject.

from setuptools import setup
# To use a consistent encoding
from codecs import open
from os import path
# To scrape version information
import re

def find_version(file_path):
    """
    Scrape version information from specified file path.

    """
    with open(file_path, 'r') as f:
        file_contents = f.read()
    version_match = re.search(r"^__version__\s*=\s*['\"]([^'\"]*)['\"]",
                              file_contents, re.M)
    if version_match:
        return version_match.group(1)
    else:
        raise RuntimeError("unable to find version string")

here = path.abspath(path.dirname(__file__))

# Get long description
with open(path.join(here, 'README.rst'), encoding='utf-8') as f:
    long_description = f.read()

setup(
    name='WellClass',

    version=find_version(path.join(here, 'WellClass', '__init__.py')),

    description='Intact/broken classification of wellhead sensor series',
    long_description=long_description,

    license='MIT',

    # See https://pypi.python.org/pypi?%3Aaction=list_classifiers
    classifiers=[
        'Development Status :: 3 - Alpha',

        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering',

        'License :: OSI Approved :: MIT License',

        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
    ],

    keywords='time series classification, well integrity, monitoring',

    packages=['WellClass'],

    python_requires='>=3.8',

    # List run-time dependencies here.  These will be installed by pip when
    # your project is installed. For an analysis of "install_requires" vs pip's
    # requirements files see:
    # https://packaging.python.org/en/latest/requirements.html
    install_requires=['numpy>=1.20.0',
                      'scipy>=1.6.0',
                      'matplotlib>=3.1.0',
                      'palettable>=3.3.0',
                      'scikit-learn>=0.24.0',
                      'pandas>=1.0.0',
                      'XlsxWriter>=1.2.0'],

    entry_points={
        'console_scripts': [
            'wellclass=WellClass.cli:main',
        ],
    },
)
