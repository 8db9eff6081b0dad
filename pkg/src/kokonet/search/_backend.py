"""Kernel selection: compiled extension when available, pure Python otherwise."""
from __future__ import annotations

try:
    from . import _lmcore as kernel  # type: ignore[attr-defined]

    HAS_COMPILED = True
except ImportError:  # extension not built
    from . import _lmcore_py as kernel  # type: ignore[no-redef]

    HAS_COMPILED = False

from . import _lmcore_py as python_kernel

BACKEND_NAME: str = kernel.BACKEND_NAME

__all__ = ["kernel", "python_kernel", "BACKEND_NAME", "HAS_COMPILED"]
