"""Hot-loop kernels with a compiled fast path and a pure numpy fallback.

The compiled extension (greenspoof._fast, built from _fast.pyx when a C
toolchain is available) and the numpy backend are bit-for-bit
interchangeable; which one is active only affects speed. Selection happens
once at import: the extension if it loaded, unless GREENSPOOF_PURE_PYTHON=1
forces the fallback.
"""

import os

from . import numpy_backend

if os.environ.get("GREENSPOOF_PURE_PYTHON") == "1":
    _impl = numpy_backend
    BACKEND = "numpy"
else:
    try:
        from greenspoof import _fast as _impl  # type: ignore[no-redef]
        BACKEND = "compiled"
    except ImportError:
        _impl = numpy_backend
        BACKEND = "numpy"

smo_solve = _impl.smo_solve
tree_best_split = _impl.tree_best_split

__all__ = ["BACKEND", "smo_solve", "tree_best_split", "numpy_backend"]
