# Sphinx configuration for the linsys documentation.

import os
import sys

sys.path.insert(0, os.path.abspath("../.."))

from linsys._meta import __author__  # noqa: E402
from linsys._meta import __version__  # noqa: E402

# -- Project information -----------------------------------------------------

project = "linsys"
copyright = "2025, " + __author__
author = __author__
version = __version__
release = __version__

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.doctest",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
    "numpydoc",
    "sphinx_gallery.gen_gallery",
]

numpydoc_show_class_members = False
autodoc_default_options = {"members": True, "inherited-members": False}
autosummary_generate = True
master_doc = "index"
exclude_patterns = ["build"]

# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
pygments_style = "sphinx"

intersphinx_mapping = {
    "python": ("https://docs.python.org/3/", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
    "pandas": ("https://pandas.pydata.org/docs/", None),
    "sklearn": ("https://scikit-learn.org/stable", None),
    "matplotlib": ("https://matplotlib.org/stable/", None),
}

sphinx_gallery_conf = {
    "examples_dirs": "../examples",
    "gallery_dirs": "auto_examples",
    "doc_module": "linsys",
    "backreferences_dir": os.path.join("generated"),
    "reference_url": {"linsys": None},
}
