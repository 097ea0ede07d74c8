import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "flatwalk._kernels",
        sources=["src/flatwalk/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}))
