"""Build script: compiles the optional fast kernels when Cython is available.

The package works without the extension; minv.kernels falls back to the
pure-numpy implementations at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "minv._kernels",
                ["src/minv/_kernels.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
