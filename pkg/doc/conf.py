# -*- coding: utf-8 -*-
#
# vrshuffle doc

import sys, os

# -- General configuration -----------------------------------------------------

extensions = ['sphinx.ext.autodoc',  'sphinx.ext.todo', 'sphinx.ext.extlinks',
              'sphinx.ext.coverage', 'sphinx.ext.mathjax', 'numpydoc']

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'vrshuffle'
copyright = u'2024, vrshuffle developers'

release = '0.1'
try:
    import vrshuffle
    release = vrshuffle.__version__
except ImportError:
    pass
version = release

exclude_trees = ['_build']
pygments_style = 'sphinx'

# -- Options for HTML output ---------------------------------------------------

html_theme = 'sphinxdoc'
html_title = 'vrshuffle: shuffle-model privacy amplification'
html_short_title = 'vrshuffle'
html_static_path = []
htmlhelp_basename = 'vrshuffledoc'
