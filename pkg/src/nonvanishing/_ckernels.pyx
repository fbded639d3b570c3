# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the loops in ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, sqrt

cdef extern from "complex.h" nogil:
    double complex cexp(double complex z)
    double complex ccosh(double complex z)

cnp.import_array()


cdef int _kron(long long a, long long n) nogil:
    cdef int k = 1
    cdef int v
    cdef long long r
    if n == 0:
        return 1 if (a == 1 or a == -1) else 0
    if (a & 1) == 0 and (n & 1) == 0:
        return 0
    v = 0
    while (n & 1) == 0:
        n >>= 1
        v += 1
    if (v & 1) and ((a & 7) == 3 or (a & 7) == 5):
        k = -k
    if n < 0:
        n = -n
        if a < 0:
            k = -k
    while True:
        if a == 0:
            return k if n == 1 else 0
        v = 0
        while (a & 1) == 0:
            a >>= 1
            v += 1
        if (v & 1) and ((n & 7) == 3 or (n & 7) == 5):
            k = -k
        if a & n & 2:
            k = -k
        r = a if a >= 0 else -a
        a = n % r
        n = r


def kronecker_scalar(long long a, long long n):
    return _kron(a, n)


def kronecker_table(long long D, Py_ssize_t q):
    cdef cnp.ndarray[cnp.int8_t, ndim=1] out = np.zeros(q, dtype=np.int8)
    cdef Py_ssize_t n
    with nogil:
        for n in range(q):
            out[n] = <cnp.int8_t>_kron(D, n)
    return out


def divisor_power_table(Py_ssize_t n_max, double complex s):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.zeros(
        n_max + 1, dtype=np.complex128)
    cdef Py_ssize_t a, b, root
    if n_max < 1:
        return out
    root = <Py_ssize_t>sqrt(<double>n_max)
    while (root + 1) * (root + 1) <= n_max:
        root += 1
    while root * root > n_max:
        root -= 1
    with nogil:
        for a in range(1, root + 1):
            out[a * a] += 1.0
            for b in range(a + 1, n_max // a + 1):
                out[a * b] += 2.0 * ccosh(s * log(<double>a / <double>b))
    return out


def divisor_sum(const double[:] values, Py_ssize_t n_max):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(
        n_max + 1, dtype=np.float64)
    cdef Py_ssize_t m, k, top
    cdef double v
    top = values.shape[0] - 1
    if top > n_max:
        top = n_max
    with nogil:
        for m in range(1, top + 1):
            v = values[m]
            if v != 0.0:
                k = m
                while k <= n_max:
                    out[k] += v
                    k += m
    return out


cdef inline double complex _phi1(double complex z) nogil:
    # (e^z - 1)/z
    if z.real * z.real + z.imag * z.imag < 1e-10:
        return 1.0 + z / 2.0 + z * z / 6.0
    return (cexp(z) - 1.0) / z


def hurwitz_character_sum(const cnp.int8_t[:] chi, double complex s, Py_ssize_t N,
                          const double complex[:] coeffs):
    cdef Py_ssize_t q = chi.shape[0]
    cdef Py_ssize_t n, a, j, m = coeffs.shape[0]
    cdef double complex total = 0.0
    cdef double complex head = 0.0
    cdef double complex corr
    cdef double na, ratio, r2, lna
    cdef int c
    with nogil:
        for n in range(1, N * q + 1):
            c = chi[n % q]
            if c != 0:
                head = head + c * cexp(-s * log(<double>n))
        for a in range(1, q + 1):
            c = chi[a % q]
            if c == 0:
                continue
            na = <double>(N * q + a)
            ratio = q / na
            r2 = ratio * ratio
            corr = 0.0
            for j in range(m - 1, -1, -1):
                corr = corr * r2 + coeffs[j]
            corr = corr * ratio
            lna = log(na)
            # n^(1-s)/(q(s-1)) shifted by the constant 1/(q(s-1)), which the
            # non-principal character sums to zero; finite at s = 1
            total = total + c * (-lna * _phi1((1.0 - s) * lna) / q
                                 + cexp(-s * lna) * (0.5 + corr))
    return complex(head + total)
