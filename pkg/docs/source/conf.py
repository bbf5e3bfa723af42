#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# SentiParse documentation build configuration file.

import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join('..', '..')))

import sentiparse  # noqa: E402

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.todo',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
]

# The source file suffix
source_suffix = '.txt'
master_doc = 'index'

project = 'SentiParse'
copyright = '2026, SentiParse developers'
author = 'SentiParse developers'

version = sentiparse.__version__
release = sentiparse.__version__

exclude_patterns = []
pygments_style = 'sphinx'
todo_include_todos = True

# Not needed to read docstrings
autodoc_mock_imports = ['torch', 'scipy']

# -- Options for HTML output ----------------------------------------------

html_theme = 'sphinx_rtd_theme'
htmlhelp_basename = 'SentiParsedoc'

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'sentiparse', 'SentiParse Documentation',
     [author], 1)
]

intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'torch': ('https://pytorch.org/docs/stable', None),
}
