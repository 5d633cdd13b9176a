"""Exhaustive audit kernels, compiled when available.

``BACKEND`` is ``"native"`` when the Cython extension imported and
``"python"`` otherwise. Set ``TFM_LAB_PURE=1`` to force the fallback.
"""
import os

from . import _pure

if os.environ.get("TFM_LAB_PURE", "") not in ("", "0"):
    _native = None
else:
    try:
        from . import _native
    except ImportError:
        _native = None

BACKEND = "native" if _native is not None else "python"
_impl = _native if _native is not None else _pure

# int64 headroom for sums of a few scaled values
INT64_SAFE = 2 ** 60


def get(name, *, force_python=False):
    """Return kernel ``name`` from the active backend (or the fallback)."""
    return getattr(_pure if force_python else _impl, name)


__all__ = ["BACKEND", "INT64_SAFE", "get"]
