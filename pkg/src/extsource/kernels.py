"""Backend selection for the numerical kernels.

The compiled extension is preferred; the pure-Python module is used when it
is missing or when ``EXTSOURCE_PURE=1`` is set in the environment.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("EXTSOURCE_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

cubic_roots_real = _impl.cubic_roots_real
cubic_roots = _impl.cubic_roots
cubic_roots_batch = _impl.cubic_roots_batch
horner = _impl.horner
aberth = _impl.aberth

__all__ = [
    "BACKEND",
    "cubic_roots_real",
    "cubic_roots",
    "cubic_roots_batch",
    "horner",
    "aberth",
]
