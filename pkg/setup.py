from setuptools import Extension, setup

# The subset-search kernel compiles to a C extension when Cython is present;
# the package falls back to the pure-Python twin at import time otherwise.
try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "preemptsched._victims_c",
                ["src/preemptsched/_victims_c.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
