from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "noisydag._mckernel",
                sources=["src/noisydag/_mckernel.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # The pure-Python kernels are selected at import if the extension is absent.
    ext_modules = []

setup(ext_modules=ext_modules)
