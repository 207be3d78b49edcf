"""Kernel backend selection: compiled extension when built, else pure Python.

Set MINIONLAB_PURE=1 to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("MINIONLAB_PURE"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels_c as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND
check_pair = _impl.check_pair
filter_tables = _impl.filter_tables
minor_table = _impl.minor_table


def saturate_masks(num_sorts, bases, bound, seeds):
    """Mask-record saturation; uses the compiled engine only when every
    relation mask fits its word size."""
    if _impl.MASK_WORD and any(b**bound > _impl.MASK_WORD for b in bases):
        return _kernels_py.saturate_masks(num_sorts, bases, bound, seeds)
    return _impl.saturate_masks(num_sorts, bases, bound, seeds)
