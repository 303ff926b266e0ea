"""Build script for the optional compiled simulation kernel.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile degrades to a warning rather than an error.
"""

import sys

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    extensions = cythonize(
        [
            Extension(
                "sinrsched._kernel_c",
                ["src/sinrsched/_kernel_c.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
except Exception as exc:  # noqa: BLE001 - any build-chain gap means "no extension"
    print(f"warning: compiled kernel disabled ({exc})", file=sys.stderr)
    extensions = []

setup(ext_modules=extensions)
