from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; kernels fall back at import
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "pmkrsa._cmont",
                ["src/pmkrsa/_cmont.pyx", "src/pmkrsa/csrc/mont.c"],
                include_dirs=["src/pmkrsa/csrc"],
                extra_compile_args=["-O3", "-funroll-loops"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
