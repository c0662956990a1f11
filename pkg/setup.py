"""Build hook for the optional compiled kernels.

The package is pure Python except for jagg._kernels._core, a small Cython
extension holding the hot circuit-evaluation loops.  If Cython or a C
compiler is unavailable the build quietly skips the extension and the
package falls back to the pure-Python kernels at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "jagg._kernels._core",
                ["src/jagg/_kernels/_core.pyx"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
