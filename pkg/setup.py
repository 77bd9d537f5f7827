"""Build script for the optional compiled matching kernel.

The package works without the extension (a pure-Python implementation is
selected at import time), so failure to build it should only happen in
environments without a C toolchain -- in that case install with
CIRA_SKIP_EXT=1.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("CIRA_SKIP_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("cira._matchext", ["src/cira/_matchext.pyx"])],
        language_level="3",
    )

setup(ext_modules=ext_modules)
