import os

from setuptools import setup

ext_modules = []
if os.environ.get("QUARTIC_FOLIATION_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "quartic_foliation.algebra._svdcore",
                    ["src/quartic_foliation/algebra/_svdcore.pyx"],
                    libraries=["mpfr", "gmp"],
                    extra_compile_args=["-O2"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
