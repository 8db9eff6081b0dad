"""Build script for the optional compiled search kernel.

The package works without the extension (a pure-Python twin is selected at
import time); building it just makes the multi-start search much faster.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("KOKONET_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "kokonet.search._lmcore",
                    ["src/kokonet/search/_lmcore.pyx"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
