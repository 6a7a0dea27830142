"""Build script: compiles the optional fast kernels.

The package works without the extension; backend.py falls back to the
pure numpy kernels when the compiled module is missing.
"""
from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "tagmax._kernels",
                sources=["src/tagmax/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": 3},
    )
except Exception as exc:  # pragma: no cover - build-env dependent
    print(f"tagmax: compiled kernels skipped ({exc}); pure backend will be used")

setup(ext_modules=ext_modules)
