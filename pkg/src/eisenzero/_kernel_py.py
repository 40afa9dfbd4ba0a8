"""Pure numpy implementation of the lattice-sum kernels.

Used when the compiled extension is unavailable (or forced via the
EISENZERO_BACKEND environment variable).  Semantics match _kernel_cy.
"""

from __future__ import annotations

import numpy as np


def _int_pow(w: np.ndarray, k: int) -> np.ndarray:
    """Elementwise w**k for integer k >= 1 by binary exponentiation."""
    result = None
    base = w
    while k:
        if k & 1:
            result = base.copy() if result is None else result * base
        k >>= 1
        if k:
            base = base * base
    return result


def pow_sum_batch(ms, ns, taus, k: int):
    """For each tau: sum over j of (ms[j]*tau + ns[j])**(-k)."""
    ms = np.asarray(ms, dtype=np.float64)
    ns = np.asarray(ns, dtype=np.float64)
    taus = np.asarray(taus, dtype=np.complex128)
    out = np.empty(taus.shape[0], dtype=np.complex128)
    for i, tau in enumerate(taus):
        w = 1.0 / (ms * tau + ns)
        out[i] = _int_pow(w, k).sum()
    return out


def pow_sum_deriv_batch(ms, ns, taus, k: int):
    """For each tau: sum over j of ms[j] * (ms[j]*tau + ns[j])**(-(k+1)).

    The caller multiplies by -k to obtain the derivative of pow_sum_batch.
    """
    ms = np.asarray(ms, dtype=np.float64)
    ns = np.asarray(ns, dtype=np.float64)
    taus = np.asarray(taus, dtype=np.complex128)
    out = np.empty(taus.shape[0], dtype=np.complex128)
    for i, tau in enumerate(taus):
        w = 1.0 / (ms * tau + ns)
        out[i] = (ms * _int_pow(w, k + 1)).sum()
    return out
