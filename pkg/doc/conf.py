# -*- coding: utf-8 -*-
#
# WellClass documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import sys
import os

# If extensions (or modules to document with autodoc) are in another directory,
# add these directories to sys.path here.
sys.path.insert(0, os.path.abspath('..'))
import WellClass

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.autosummary',
    'numpydoc'
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = 'WellClass'
copyright = '2026, WellClass developers'
author = 'WellClass developers'

# The short X.Y version and the full version, including alpha/beta/rc tags.
version = WellClass.__version__
release = WellClass.__version__

exclude_patterns = ['_build']
pygments_style = 'sphinx'
todo_include_todos = False

# -- Options for HTML output ----------------------------------------------

html_theme = 'sphinx_rtd_theme'
htmlhelp_basename = 'WellClassdoc'

# -- Options for LaTeX output ---------------------------------------------

latex_documents = [
  (master_doc, 'WellClass.tex', 'WellClass Documentation',
   author, 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'wellclass', 'WellClass Documentation',
     [author], 1)
]
