"""Build script: compiles the optional speed kernels.

The compiled extension is a pure accelerator; if Cython or a C toolchain is
missing the install falls back to the pure-Python kernels without failing.
Set EQUIVFUSE_NO_EXT=1 to skip the extension build entirely, or
EQUIVFUSE_REQUIRE_EXT=1 to turn a failed build into a hard error.
"""

import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


def _extensions():
    if os.environ.get("EQUIVFUSE_NO_EXT") == "1":
        return []
    try:
        from Cython.Build import cythonize
        from setuptools.extension import Extension
    except ImportError:
        print("equivfuse: Cython not available, building without speed kernels", file=sys.stderr)
        return []
    ext = Extension(
        "equivfuse._kernels._speed",
        sources=["src/equivfuse/_kernels/_speed.pyx"],
    )
    return cythonize([ext], language_level=3)


class optional_build_ext(build_ext):
    """Build the extension if possible, otherwise install pure-Python only."""

    def run(self):
        try:
            super().run()
        except Exception as exc:
            self._handle(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._handle(exc)

    def _handle(self, exc):
        if os.environ.get("EQUIVFUSE_REQUIRE_EXT") == "1":
            raise
        print(f"equivfuse: speed kernel build failed ({exc}); "
              "falling back to pure-Python kernels", file=sys.stderr)


setup(ext_modules=_extensions(), cmdclass={"build_ext": optional_build_ext})
