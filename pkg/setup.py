"""Build script for the optional compiled message-passing kernels.

The package is fully functional without the extension (a numpy fallback is
selected at import time); any build failure therefore only costs speed.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    import numpy as np
except ImportError:  # pragma: no cover - numpy is a hard runtime dep anyway
    np = None

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    cythonize = None


class OptionalBuildExt(build_ext):
    """build_ext that degrades to the pure-python package on failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"warning: skipping compiled kernels ({exc}); "
                  "the numpy fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: building {ext.name} failed ({exc}); "
                  "the numpy fallback will be used")


ext_modules = []
if cythonize is not None and np is not None:
    ext_modules = cythonize(
        [
            Extension(
                "mshgnn.kernels._core",
                ["src/mshgnn/kernels/_core.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
