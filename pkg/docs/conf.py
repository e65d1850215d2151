# -*- coding: utf-8 -*-
#
# pyincrements documentation build configuration file.
#
# This file is execfile()d with the current directory set to its containing dir.

import sys, os

# If extensions (or modules to document with autodoc) are in another directory,
# add these directories to sys.path here.
sys.path.insert(0, os.path.abspath('..'))

import pyincrements

# -- General configuration -----------------------------------------------------

extensions = ['sphinx.ext.viewcode', 'sphinx.ext.autodoc']

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = u'pyincrements'
copyright = u'2026, pyincrements developers'

# The short X.Y version and the full version.
version = pyincrements.version
release = pyincrements.version

exclude_patterns = ['_build']

add_module_names = True

pygments_style = 'sphinx'

# -- Options for HTML output ---------------------------------------------------

html_theme = 'default'

html_static_path = ['_static']

html_show_sourcelink = False

htmlhelp_basename = 'pyincrements' + release.replace('.', '_')

autoclass_content = "init"

# -- Options for LaTeX output --------------------------------------------------

latex_documents = [
  ('index', 'pyincrements.tex', u'pyincrements Documentation',
   u'pyincrements developers', 'manual'),
]

# -- Options for manual page output --------------------------------------------

man_pages = [
    ('index', 'pyincrements', u'pyincrements Documentation',
     [u'pyincrements developers'], 1)
]
