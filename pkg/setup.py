"""Build hook for the optional compiled simplex kernel.

The package works without it; ``regionprune._kernels`` falls back to the
numpy implementation when the extension is missing.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("REGIONPRUNE_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "regionprune._kernels._simplex",
                    ["src/regionprune/_kernels/_simplex.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
