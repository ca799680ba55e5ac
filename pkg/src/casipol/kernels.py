"""Backend selection for the hot Matsubara-term kernel.

The compiled extension is used when it imports; set ``CASIPOL_PURE_PYTHON=1``
to force the numpy fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
term_integrals = _kernels_py.term_integrals

if os.environ.get("CASIPOL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        term_integrals = _kernels.term_integrals
        BACKEND = "cython"

__all__ = ["BACKEND", "term_integrals"]
