"""Build script: compiles the optional accelerator extension.

The package is fully functional without the extension; turingcost.engine
falls back to the pure-Python kernel when the compiled module is missing.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "turingcost._kernel",
                ["src/turingcost/_kernel.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
