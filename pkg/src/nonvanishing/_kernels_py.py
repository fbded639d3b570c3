"""Pure numpy implementations of the hot loops.

These are the reference versions; ``_ckernels.pyx`` mirrors each function
and the two are required to agree to rounding.
"""
from __future__ import annotations

import math

import numpy as np

from .arith import factorize, kronecker

_CHUNK = 1 << 18


def _legendre_table(p: int) -> np.ndarray:
    """``(r/p)`` for ``0 <= r < p``, ``p`` an odd prime."""
    tab = -np.ones(p, dtype=np.int8)
    squares = (np.arange(1, p, dtype=np.int64) ** 2) % p
    tab[squares] = 1
    tab[0] = 0
    return tab


def kronecker_table(D: int, q: int) -> np.ndarray:
    """``(D/n)`` for ``0 <= n < q`` (int8).

    For odd ``m`` the Jacobi symbol ``(D/m)`` is split over the prime
    factors of ``D``; each odd prime is flipped by reciprocity into a
    residue-table lookup.
    """
    D = int(D)
    q = int(q)
    n = np.arange(q, dtype=np.int64)
    out = np.zeros(q, dtype=np.int8)
    if q == 0:
        return out
    if D == 0:
        out[n == 1] = 1
        return out
    # odd part m and 2-adic valuation tz of each n
    m = n.copy()
    m[0] = 1
    tz = np.zeros(q, dtype=np.int64)
    while True:
        even = (m & 1) == 0
        if not even.any():
            break
        tz[even] += 1
        m[even] >>= 1
    val = np.ones(q, dtype=np.int64)
    # factor (D/2)^v for the even part of n
    if D % 2 == 0:
        val[tz > 0] = 0
    else:
        d2 = 1 if D % 8 in (1, 7) else -1
        val *= np.where(tz & 1, d2, 1)
    # (D/m) for odd m > 0: sign of D, then each prime power of |D|
    if D < 0:
        val *= np.where((m & 3) == 3, -1, 1)
    for p, e in factorize(abs(D)).items():
        if e % 2 == 0 and p != 2:
            # (p/m)^2 is 1 unless p | m
            val *= (m % p != 0)
            continue
        if p == 2:
            if e & 1:
                val *= np.where(((m & 7) == 3) | ((m & 7) == 5), -1, 1)
            continue
        leg = _legendre_table(p)[m % p].astype(np.int64)
        if p % 4 == 3:
            leg *= np.where((m & 3) == 3, -1, 1)
        val *= leg
    out[:] = val
    out[0] = 1 if abs(D) == 1 else 0
    return out


def divisor_power_table(n_max: int, s: complex) -> np.ndarray:
    """``r_s(n) = sum_{ab=n} (a/b)^s`` for ``0 <= n <= n_max``."""
    out = np.zeros(n_max + 1, dtype=np.complex128)
    if n_max < 1:
        return out
    for a in range(1, math.isqrt(n_max) + 1):
        b = np.arange(a, n_max // a + 1, dtype=np.int64)
        terms = 2.0 * np.cosh(s * np.log(a / b))
        terms[0] = 1.0
        out[a * b] += terms
    return out


def divisor_sum(values: np.ndarray, n_max: int) -> np.ndarray:
    """``out[n] = sum of values[m] over m | n`` with ``1 <= m < len(values)``."""
    out = np.zeros(n_max + 1, dtype=np.float64)
    top = min(len(values) - 1, n_max)
    for m in np.flatnonzero(values[1 : top + 1]) + 1:
        out[m::m] += values[m]
    return out


def hurwitz_character_sum(
    chi: np.ndarray, s: complex, N: int, coeffs: np.ndarray
) -> complex:
    """``L(s, chi)`` from the Hurwitz decomposition with ``N`` explicit blocks.

    ``chi`` is a non-principal character table mod ``q``; ``coeffs[j-1]`` holds the
    Euler-Maclaurin factor ``B_2j/(2j)! * s(s+1)...(s+2j-2)``.
    """
    q = len(chi)
    chi_f = chi.astype(np.float64)
    total = 0.0 + 0.0j
    end = N * q
    for lo in range(1, end + 1, _CHUNK):
        hi = min(lo + _CHUNK, end + 1)
        n = np.arange(lo, hi, dtype=np.float64)
        c = chi_f[np.arange(lo, hi) % q]
        mask = c != 0
        total += np.sum(c[mask] * np.exp(-s * np.log(n[mask])))
    a = np.arange(1, q + 1)
    c = chi_f[a % q]
    mask = c != 0
    na = (N * q + a[mask]).astype(np.float64)
    ratio = q / na
    r2 = ratio * ratio
    # Horner in (q/n)^2 for sum_j c_j (q/n)^(2j-1)
    corr = np.zeros_like(na, dtype=np.complex128)
    for cj in coeffs[::-1]:
        corr = corr * r2 + cj
    corr *= ratio
    lna = np.log(na)
    # n^(1-s)/(q(s-1)) minus the constant 1/(q(s-1)), which a non-principal
    # character sums to zero; this form stays finite at s = 1
    z = (1.0 - s) * lna
    small = np.abs(z) < 1e-5
    phi1 = np.where(small, 1 + z / 2 + z * z / 6, np.expm1(z) / np.where(small, 1, z))
    total += np.sum(c[mask] * (-lna * phi1 / q + np.exp(-s * lna) * (0.5 + corr)))
    return complex(total)


def kronecker_scalar(a: int, n: int) -> int:
    return kronecker(a, n)
