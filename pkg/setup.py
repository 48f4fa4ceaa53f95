"""Build script: compiles the optional Monte Carlo kernel.

The package works without the extension (a pure-Python path is selected at
import time); set PARADEC_SKIP_EXT=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("PARADEC_SKIP_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("paradec._mckernel", ["src/paradec/_mckernel.pyx"])],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
