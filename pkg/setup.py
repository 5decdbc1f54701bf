"""Build script for the optional compiled face-flux kernels.

The package is fully functional without the extension: cmcstrip._kernels
falls back to the numpy implementation when the compiled module is absent
(or when CMCSTRIP_PURE_PYTHON=1). Building requires Cython and a C compiler;
failures are non-fatal.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy as np

    ext = Extension(
        "cmcstrip._kernels._core",
        ["src/cmcstrip/_kernels/_core.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
        optional=True,
    )
    ext_modules = cythonize(
        [ext],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
