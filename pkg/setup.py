from setuptools import setup
from Cython.Build import cythonize

setup(
    ext_modules=cythonize(
        ["src/widthjump/_novelty_core.pyx"],
        compiler_directives={"language_level": "3"},
    ),
)
