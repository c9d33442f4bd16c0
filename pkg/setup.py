from setuptools import setup

try:
    from Cython.Build import cythonize
except ImportError:
    # the pure-numpy kernels are used when the extension is absent
    ext_modules = []
else:
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "triunitary._kernels",
                ["src/triunitary/_kernels.pyx"],
                extra_compile_args=["-O3", "-fcx-limited-range"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
