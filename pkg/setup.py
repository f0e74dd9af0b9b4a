from setuptools import Extension, setup

# The compiled kernel is optional: when Cython (or a C toolchain) is not
# available the package falls back to the pure-Python engine at import time.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "percosweep._core",
                ["src/percosweep/_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
