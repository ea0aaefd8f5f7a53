import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("QUOTASIG_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "quotasig._kernels._fastcore",
                    ["src/quotasig/_kernels/_fastcore.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # Fall back to the pure-Python kernel; the package still works.
        ext_modules = []

setup(ext_modules=ext_modules)
