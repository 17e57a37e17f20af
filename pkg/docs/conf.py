import os
import sys
import sphinx_rtd_theme

source_suffix = '.rst'
source_encoding = 'utf-8-sig'

# -- Language ----------------------------------------------------------------
language = os.getenv('READTHEDOCS_LANGUAGE', 'en')

# -- Theme -------------------------------------------------------------------
html_theme = 'sphinx_rtd_theme'
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
html_theme_options = {
    'logo_only': False,
    'collapse_navigation': False,  # tree-like navigation
    'prev_next_buttons_location': 'bottom',
}

# -- Project information -----------------------------------------------------

project = 'acvar'
copyright = '2026, acvar developers'
author = 'acvar developers'

release = '0.1.0'
version = '0.1.0'


# -- General configuration ---------------------------------------------------

extensions = ['breathe', 'sphinx_rtd_theme', 'sphinx.ext.autosectionlabel']

# Breathe reads the doxygen xml generated from forms/acvar
breathe_projects = {
    'acvar': './xml'
}

templates_path = ['_templates']

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

html_static_path = ['_static']
