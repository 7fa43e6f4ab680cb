"""Kernel selection.

The compiled extension is used when it is importable; setting the
environment variable ``XPJOST_PURE=1`` forces the numpy fallback.
``BACKEND`` records which one is active.
"""
import os

from . import _fallback

if os.environ.get("XPJOST_PURE", "") not in ("", "0"):
    _impl = None
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = None

if _impl is None:
    BACKEND = "python"
    jacobi_hermitian = _fallback.jacobi_hermitian
    dirichlet_sum = _fallback.dirichlet_sum
else:
    BACKEND = "compiled"
    jacobi_hermitian = _impl.jacobi_hermitian
    dirichlet_sum = _impl.dirichlet_sum

__all__ = ["BACKEND", "jacobi_hermitian", "dirichlet_sum"]
