"""
Setup file for linsys

Sample-splitting tests for non-negative solutions of estimated linear systems.
"""

from setuptools import setup
from setuptools import find_packages
from codecs import open
from os import path

# Get __version__ from _meta.py
with open(path.join("linsys", "_meta.py")) as f:
    exec(f.read())

_here = path.abspath(path.dirname(__file__))
with open(path.join(_here, "README.rst"), encoding="utf-8") as f:
    LONG_DESCRIPTION = f.read()

setup(
    name="linsys",
    packages=find_packages(exclude=["tests"]),
    package_dir={"linsys": "linsys"},
    author=__author__,
    version=__version__,
    description="Testing whether an estimated linear system has a solution "
    "with non-negative components.",
    long_description=LONG_DESCRIPTION,
    include_package_data=True,
    license="MIT",
    zip_safe=False,
    python_requires=">=3.8",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    keywords="partial-identification moment-inequalities hypothesis-testing "
    "linear-programming econometrics",
    install_requires=[
        "numpy",
        "scipy",
        "scikit-learn",
        "pandas",
        "matplotlib",
        "joblib",
    ],
    extras_require={
        "tests": ["coverage", "pytest"],
        "docs": ["sphinx", "sphinx_rtd_theme", "sphinx_gallery", "numpydoc"],
    },
    entry_points={"console_scripts": ["linsys=linsys.cli:main"]},
)
