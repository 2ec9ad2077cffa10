"""Builds the optional compiled kernel; the package runs without it."""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("rulerank._fastkernels", ["src/rulerank/_fastkernels.pyx"])],
        language_level="3",
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
