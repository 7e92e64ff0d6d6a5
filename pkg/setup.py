from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python fallback is selected at import time
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "urnctrw._kernels",
                ["src/urnctrw/_kernels.pyx"],
                # identical IEEE arithmetic to the Python fallback
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
