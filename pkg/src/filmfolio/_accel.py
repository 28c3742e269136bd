"""Optional numba acceleration.

Each hot kernel exists twice: a loop version compiled with numba, and a
vectorised numpy version. ``FILMFOLIO_DISABLE_NUMBA=1`` (or numba missing)
routes every call to the numpy path. Both paths consume identical inputs,
including pre-drawn random streams, so their outputs agree to rounding.
"""

from __future__ import annotations

import os

_FLAG = "FILMFOLIO_DISABLE_NUMBA"


def _disabled_by_env() -> bool:
    return os.environ.get(_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


try:
    if _disabled_by_env():
        raise ImportError(f"{_FLAG} is set")
    import numba as _numba
except ImportError:
    _numba = None

NUMBA_AVAILABLE = _numba is not None


def njit(func):
    """Compile ``func`` with numba, or return None when acceleration is off."""
    if _numba is None:
        return None
    return _numba.njit(cache=True)(func)


def jitable(func):
    """Mark a helper callable from both compiled kernels and plain Python."""
    if _numba is None:
        return func
    from numba.extending import register_jitable

    return register_jitable(func)


def resolve_backend(requested: str = "auto") -> str:
    if requested == "auto":
        return "numba" if NUMBA_AVAILABLE else "numpy"
    if requested == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError(f"numba backend requested but unavailable (check {_FLAG})")
    if requested not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {requested!r}")
    return requested
