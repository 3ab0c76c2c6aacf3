"""Build script: compiles the optional lattice search extension.

The package works without it; wmdubins.oracle falls back to the pure
Python kernel when the extension is missing or fails to build.
"""

from setuptools import setup
from setuptools.extension import Extension

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "wmdubins._lattice",
                ["src/wmdubins/_lattice.pyx"],
                language="c++",
                extra_compile_args=["-O3", "-std=c++11"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
