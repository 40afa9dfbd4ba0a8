"""Build script: compiles the lattice-sum extension when Cython and a C
compiler are available, otherwise installs with the numpy fallback kernel."""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "eisenzero._kernel_cy",
                ["src/eisenzero/_kernel_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    sys.stderr.write(
        "eisenzero: compiled kernel disabled (%s); using numpy fallback\n" % exc
    )

setup(ext_modules=ext_modules)
