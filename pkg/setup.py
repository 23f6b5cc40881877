"""Build script for the compiled decoder kernels.

The package works without the extension (a NumPy fallback is selected at
import time), but the compiled kernels make Monte Carlo sweeps and list
decoding considerably faster.
"""

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "semlink._kernels._polar_c",
        ["src/semlink/_kernels/_polar_c.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
