"""Kernel backend selection.

Imports the compiled kernels when the extension built, otherwise the
pure numpy fallback.  TAGMAX_PURE=1 forces the fallback regardless.
"""
from __future__ import annotations

import os

if os.environ.get("TAGMAX_PURE"):
    from . import _kernels_py as kernels

    BACKEND = "pure"
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as kernels

        BACKEND = "pure"


def which() -> str:
    """Name of the active backend: "compiled" or "pure"."""
    return BACKEND
