# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled lattice-sum kernels.

The inner loop computes (m*tau + n)**(-k) for up to ~1e6 coprime pairs per
evaluation point; integer powers go through binary exponentiation and the
accumulator is Kahan-compensated.
"""

import numpy as np


ctypedef double complex dcomplex


cdef inline dcomplex ipow(dcomplex w, int k) nogil:
    cdef dcomplex result = 1.0
    cdef dcomplex base = w
    while k:
        if k & 1:
            result = result * base
        k >>= 1
        if k:
            base = base * base
    return result


def pow_sum_batch(const long[::1] ms, const long[::1] ns, dcomplex[::1] taus, int k):
    """For each tau: sum over j of (ms[j]*tau + ns[j])**(-k)."""
    cdef Py_ssize_t nt = taus.shape[0]
    cdef Py_ssize_t npairs = ms.shape[0]
    out = np.empty(nt, dtype=np.complex128)
    cdef dcomplex[::1] out_v = out
    cdef Py_ssize_t i, j
    cdef dcomplex tau, term, s, comp, y, t
    with nogil:
        for i in range(nt):
            tau = taus[i]
            s = 0
            comp = 0
            for j in range(npairs):
                term = ipow(1.0 / (ms[j] * tau + ns[j]), k)
                y = term - comp
                t = s + y
                comp = (t - s) - y
                s = t
            out_v[i] = s
    return out


def pow_sum_deriv_batch(const long[::1] ms, const long[::1] ns, dcomplex[::1] taus, int k):
    """For each tau: sum over j of ms[j] * (ms[j]*tau + ns[j])**(-(k+1))."""
    cdef Py_ssize_t nt = taus.shape[0]
    cdef Py_ssize_t npairs = ms.shape[0]
    out = np.empty(nt, dtype=np.complex128)
    cdef dcomplex[::1] out_v = out
    cdef Py_ssize_t i, j
    cdef dcomplex tau, term, s, comp, y, t
    cdef int kk = k + 1
    with nogil:
        for i in range(nt):
            tau = taus[i]
            s = 0
            comp = 0
            for j in range(npairs):
                term = ms[j] * ipow(1.0 / (ms[j] * tau + ns[j]), kk)
                y = term - comp
                t = s + y
                comp = (t - s) - y
                s = t
            out_v[i] = s
    return out
