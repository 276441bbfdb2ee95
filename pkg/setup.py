"""Builds the optional compiled merge kernel.

The package works without it; the pure-Python kernel is selected at import
when the extension is missing.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(["src/mudscope/_kernel.pyx"], language_level=3)
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"skipping compiled kernel ({exc}); pure-Python fallback will be used")

setup(ext_modules=ext_modules)
