# -*- coding: utf-8 -*-
#
# patchr0 documentation build configuration file.

import sys
import os

sys.path.insert(0, os.path.abspath('..'))

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
    'sphinx.ext.autosummary'
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'patchr0'
copyright = u'2026, the patchr0 developers'
author = u'the patchr0 developers'

# The short X.Y version.
version = '0.1'
# The full version, including alpha/beta/rc tags.
release = '0.1.0'

language = 'en'
exclude_patterns = ['_build']
pygments_style = 'sphinx'

napoleon_numpy_docstring = True
napoleon_google_docstring = False
autodoc_member_order = 'bysource'

html_theme = 'alabaster'
html_static_path = []
htmlhelp_basename = 'patchr0doc'

latex_documents = [
  (master_doc, 'patchr0.tex', u'patchr0 Documentation',
   author, 'manual'),
]

man_pages = [
    ('index', 'patchr0', u'patchr0 Documentation',
     [author], 1)
]
