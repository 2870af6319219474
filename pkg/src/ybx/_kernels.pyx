# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the theta series and the elliptic gamma product."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, cos, sin, sqrt, M_PI

cnp.import_array()


cdef inline double complex _cexp(double complex w) nogil:
    cdef double m = exp(w.real)
    return m * cos(w.imag) + 1j * m * sin(w.imag)


cdef inline double _cabs(double complex w) nogil:
    return sqrt(w.real * w.real + w.imag * w.imag)


def theta1_series(cnp.ndarray[cnp.complex128_t, ndim=1] z, double complex tau, int nterms):
    """Truncated odd theta series, summed over half-integers |k + 1/2| <= nterms."""
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t i
    cdef int k
    cdef double half
    cdef double complex acc
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] nome = np.empty(2 * nterms, dtype=np.complex128)
    for k in range(-nterms, nterms):
        half = k + 0.5
        nome[k + nterms] = _cexp(1j * M_PI * half * half * tau)
    for i in range(n):
        acc = 0
        for k in range(-nterms, nterms):
            half = k + 0.5
            acc = acc + nome[k + nterms] * _cexp(2j * M_PI * half * (z[i] + 0.5))
        out[i] = -acc
    return out


def egamma_product(cnp.ndarray[cnp.complex128_t, ndim=1] z, double complex p,
                   double complex q, int nterms):
    """Truncated elliptic gamma double product.

    Returns the values and the smallest denominator modulus met.
    """
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t i, a, b
    cdef Py_ssize_t size = nterms + 1
    cdef double complex e, einv, num, den, acc, pq
    cdef double mind = 1e300
    cdef double d
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] table = np.empty(size * size, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef double complex pa = 1
    cdef double complex qb
    for a in range(size):
        qb = 1
        for b in range(size):
            table[a * size + b] = pa * qb
            qb = qb * q
        pa = pa * p
    pq = p * q
    for i in range(n):
        e = _cexp(2j * M_PI * z[i])
        einv = 1.0 / e
        acc = 1
        for a in range(size * size):
            num = 1 - einv * table[a] * pq
            den = 1 - e * table[a]
            d = _cabs(den)
            if d < mind:
                mind = d
            acc = acc * num / den
        out[i] = acc
    return out, mind
