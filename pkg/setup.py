"""Build script for the optional compiled kernels.

The package is pure Python plus one Cython extension holding the hot
per-pixel/per-pair loops (HOG binning, constraint gather/scatter).  If
Cython or a C compiler is unavailable the extension is skipped and the
numpy fallback in rpcf._hotpath_py is used at import time.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "rpcf._hotpath",
                ["src/rpcf/_hotpath.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
