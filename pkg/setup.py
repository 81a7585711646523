"""Build script for the optional compiled kernels.

The Cython extension is best-effort: when Cython or a C compiler is not
available the package installs without it and ``pintime.kernels`` falls back
to the pure-Python implementation at import time.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("PINTIME_NO_EXTENSION", "") == "":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        extensions = [
            Extension(
                "pintime._ckernels",
                ["src/pintime/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                # no fast-math / fma contraction: results must match the
                # pure-Python path step for step
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ]
        ext_modules = cythonize(
            extensions,
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except Exception as exc:  # pragma: no cover - depends on the toolchain
        print(f"warning: building without compiled kernels ({exc})")
        ext_modules = []

setup(ext_modules=ext_modules)
