"""Kernel backend selection.

Prefers the compiled extension; falls back to the numpy implementation.
Set EISENZERO_BACKEND=numpy (or =cython) to force a choice — the benchmark
uses this to compare both.
"""

from __future__ import annotations

import os

_requested = os.environ.get("EISENZERO_BACKEND", "").strip().lower()

if _requested in ("numpy", "python", "py"):
    from . import _kernel_py as _impl

    BACKEND = "numpy"
elif _requested in ("", "cython", "c", "auto"):
    try:
        from . import _kernel_cy as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        if _requested in ("cython", "c"):
            raise
        from . import _kernel_py as _impl

        BACKEND = "numpy"
else:
    raise ValueError(f"unknown EISENZERO_BACKEND={_requested!r}")

pow_sum_batch = _impl.pow_sum_batch
pow_sum_deriv_batch = _impl.pow_sum_deriv_batch
