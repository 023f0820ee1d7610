"""Build script: compiles the optional prover speedup extension.

The package works without the extension (a pure-Python twin of the
evaluation engine is selected at import time), so any failure to build
the .pyx module degrades to a source-only install instead of aborting.
"""

from setuptools import Extension, setup

extensions = []
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "cbcforge.prover._engine",
                ["src/cbcforge/prover/_engine.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # Cython or a C compiler is missing: install pure
    print("cbcforge: skipping compiled engine (%s)" % exc)

setup(ext_modules=extensions)
