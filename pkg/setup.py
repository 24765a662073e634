"""Build the optional compiled kernel extension.

The package works without the extension (a numpy/pure-Python backend is
selected at import time), but the compiled kernels make the t-SNE and UMAP
stages roughly an order of magnitude faster.

``-ffp-contract=off`` keeps the compiler from fusing multiply-adds so the
sequential UMAP kernel performs bit-identical arithmetic to the pure-Python
backend.
"""

import numpy as np
from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension(
        "hepaflow._kernels._cext",
        ["src/hepaflow/_kernels/_cext.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3", "-ffp-contract=off"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False, "cdivision": True},
    )
)
