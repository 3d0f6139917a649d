import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "floqkerr._orbit_cy",
                ["src/floqkerr/_orbit_cy.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    # No Cython at build time: the package falls back to the NumPy kernels.
    ext_modules = []

setup(ext_modules=ext_modules, include_dirs=[numpy.get_include()])
