"""Build hook for the optional compiled audit kernels.

The pure-Python kernels in ``tfm_lab._kernels._pure`` are used whenever the
extension is missing, so a failed compile never breaks the install.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "tfm_lab._kernels._native",
                ["src/tfm_lab/_kernels/_native.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
