"""Backend selection for the functional-graph kernels.

The compiled ``_speedups`` extension is used when it imports; otherwise, or
when ``HYPERFIN_PURE_PYTHON=1`` is set, the ``_purepy`` module supplies the
same functions.
"""
from __future__ import annotations

import os

from . import _purepy

if os.environ.get("HYPERFIN_PURE_PYTHON", "") not in ("", "0"):
    _impl = _purepy
else:
    try:
        from . import _speedups as _impl
    except ImportError:  # extension not built
        _impl = _purepy

BACKEND: str = _impl.BACKEND

three_color = _impl.three_color
recurrent_mask = _impl.recurrent_mask
check_recurrent = _impl.check_recurrent
contraction_classes = _impl.contraction_classes
quotient_succ = _impl.quotient_succ
component_labels = _impl.component_labels
exhaustive_recurrence = _impl.exhaustive_recurrence


def backends() -> dict:
    """All importable kernel modules by backend name."""
    out = {"python": _purepy}
    try:
        from . import _speedups
    except ImportError:
        pass
    else:
        out["cython"] = _speedups
    return out
