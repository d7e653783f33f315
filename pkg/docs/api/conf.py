# docs/api/conf.py

import os
import sys

project_root = os.path.abspath('../..')

sys.path.insert(0, os.path.join(project_root, 'src'))

project = 'sdsv-evalkit'

extensions = [
    'sphinx.ext.autodoc',
    'sphinx_rtd_theme',
    'sphinx.ext.autodoc.typehints'
]

html_theme = 'sphinx_rtd_theme'
autodoc_typehints = "description"
autoclass_content = "both"
