"""Kernel dispatch: the compiled extension when it imports, else the
pure-Python fallback.  Set ``SKEWCERT_PURE=1`` to force the fallback."""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("SKEWCERT_PURE"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined,no-redef]
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"

sparse_mul = _impl.sparse_mul
sparse_square = _impl.sparse_square
bareiss_echelon = _impl.bareiss_echelon
rank_mod = _impl.rank_mod
independent_rows_mod = _impl.independent_rows_mod

__all__ = ["BACKEND", "sparse_mul", "sparse_square", "bareiss_echelon", "rank_mod", "independent_rows_mod"]
