"""Kernel backend selection.

The compiled extension is used when it imports cleanly; otherwise, or when
the environment variable ``CFWB_PURE`` is set to a non-empty value other
than ``0``, the numpy fallback is used. Both backends are bit-identical.
"""

import os

from . import _fallback

_FORCE_PURE = os.environ.get("CFWB_PURE", "") not in ("", "0")

try:
    if _FORCE_PURE:
        raise ImportError("CFWB_PURE set")
    from . import _kernels as _impl

    BACKEND = "compiled"
except ImportError:
    _impl = _fallback
    BACKEND = "python"

lift_forward = _impl.lift_forward
lift_inverse = _impl.lift_inverse
rice_encode = _impl.rice_encode
rice_decode = _impl.rice_decode


def compiled():
    """Return the compiled kernel module, or None if it is unavailable."""
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels
