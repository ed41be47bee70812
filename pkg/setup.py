import os

import numpy as np
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    cythonize = None


class OptionalBuildExt(build_ext):
    """Compiled kernels are optional; the package falls back to pure Python."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: skipping compiled kernels ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: could not build {ext.name} ({exc})")


extensions = []
if cythonize is not None and not os.environ.get("HEUN_NO_EXTENSIONS"):
    extensions = cythonize(
        [
            Extension(
                "heun_spectrum._sturm",
                ["src/heun_spectrum/_sturm.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            ),
            Extension(
                "heun_spectrum._mpjacobi",
                ["src/heun_spectrum/_mpjacobi.pyx"],
                libraries=["mpfr", "gmp"],
                extra_compile_args=["-O2"],
            ),
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})
