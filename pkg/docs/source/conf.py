# -*- coding: utf-8 -*-
#
# Tracelink documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import sys
import os

# If extensions (or modules to document with autodoc) are in another directory,
# add these directories to sys.path here.
sys.path.insert(0, os.path.abspath(os.path.join("..", "..")))


from tracelink.meta import version as project_version

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.todo',
    'sphinx.ext.coverage',
    'sphinx.ext.intersphinx',
]

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = 'Tracelink'
copyright = '2020-2026 Tracelink Contributors'
author = 'Tracelink Contributors'

# The short X.Y version.
version = ".".join(project_version.split(".")[0:2])
# The full version, including alpha/beta/rc tags.
release = project_version

language = None

exclude_patterns = []

pygments_style = 'friendly'

todo_include_todos = True


# -- Options for HTML output ----------------------------------------------

html_theme = 'nature'

html_title = "Tracelink {}".format(version)

htmlhelp_basename = 'Tracelinkdoc'


# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'tracelink', 'Tracelink Documentation', [author], 1)
]


intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable', None),
    'scipy': ('https://docs.scipy.org/doc/scipy', None),
}

autodoc_default_options = {
    'member-order': 'bysource',
    'undoc-members': True,
    'exclude-members': '__weakref__',
}
