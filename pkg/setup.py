"""Build script for the optional compiled kernel extension.

The package works without the extension (rulespace.kernels falls back to the
numpy implementation), so a failed compile only costs speed.
"""

from setuptools import Extension, setup


def extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "rulespace._core",
        ["src/rulespace/_core.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions())
