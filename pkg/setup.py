"""Builds the optional Cython speedup extension.

The package is fully functional without it; `policylens._kernel` falls back
to the pure-Python implementation when the extension is missing.
"""
from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/policylens/_kernel/_speedups.pyx",
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
