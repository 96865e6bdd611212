"""Build script: compiles the optional Cython kernel core.

The package works without the extension (a NumPy fallback is selected at
import time), so a failed compile only costs speed.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Let the install proceed when no compiler toolchain is available."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            warnings.warn(f"building the compiled kernels failed ({exc}); "
                          "falling back to the pure-NumPy backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            warnings.warn(f"{ext.name} failed to compile ({exc}); "
                          "falling back to the pure-NumPy backend")


def make_ext_modules():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [
            Extension(
                "fraclyap._kernels._ckernels",
                sources=["src/fraclyap/_kernels/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )


setup(ext_modules=make_ext_modules(), cmdclass={"build_ext": OptionalBuildExt})
