"""Hot-loop kernels with backend selection at import.

The compiled ``_kernels`` extension is used when it was built; otherwise the
pure-Python ``_kernels_py`` module is used.  Set ``HTK_PURE_PYTHON=1`` to force
the fallback.  ``BACKEND`` names the active implementation.
"""
import os

from . import _kernels_py

_force_pure = os.environ.get("HTK_PURE_PYTHON", "").strip() not in ("", "0")

try:
    if _force_pure:
        raise ImportError("pure-Python kernels forced by HTK_PURE_PYTHON")
    from . import _kernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"

levenshtein = _impl.levenshtein
levenshtein_to_many = _impl.levenshtein_to_many
iou_1d = _impl.iou_1d
forward_substitute = _impl.forward_substitute


def available_backends():
    """Map of backend name to kernel module, for tests and benchmarks."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
