"""Exact integer and character arithmetic.

Kronecker symbols, the Mobius sieve, the square-split ``M_Y``/``R_Y``,
the shifted divisor function ``r_s(n)`` and the twisted Gauss sums
``G_k(n)`` together with their closed-form prime-power evaluation.
"""
from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator

import numpy as np

from .errors import BudgetExceeded, DomainError

# μ tables beyond this many entries are refused rather than attempted.
MAX_SIEVE_LIMIT = 200_000_000

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol ``(a/n)`` for arbitrary integers ``a`` and ``n``.

    Binary reciprocity algorithm (Cohen, Alg. 1.4.10); handles ``n`` zero,
    negative or even.
    """
    a = int(a)
    n = int(n)
    if n == 0:
        return 1 if abs(a) == 1 else 0
    if not (a & 1) and not (n & 1):
        return 0
    v = 0
    while not (n & 1):
        n >>= 1
        v += 1
    k = 1
    if v & 1 and (a & 7) in (3, 5):
        k = -k
    if n < 0:
        n = -n
        if a < 0:
            k = -k
    # n is now odd and positive
    while True:
        if a == 0:
            return k if n == 1 else 0
        v = 0
        while not (a & 1):
            a >>= 1
            v += 1
        if v & 1 and (n & 7) in (3, 5):
            k = -k
        if a & n & 2:
            k = -k
        r = abs(a)
        a = n % r
        n = r


def is_probable_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24, probabilistic beyond."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while not d & 1:
        d >>= 1
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r <<= 1
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


@lru_cache(maxsize=65536)
def _factor_tuple(n: int) -> tuple[tuple[int, int], ...]:
    out: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 7
    # wheel-free trial division is plenty for desk-scale inputs
    while f * f <= n and f < 10_000:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 2
    stack = [n] if n > 1 else []
    rng = random.Random(n)
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        g = _pollard_brent(m, rng)
        stack.extend((g, m // g))
    return tuple(sorted(out.items()))


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation of ``|n|`` as ``{p: exponent}`` (empty for 1)."""
    n = abs(int(n))
    if n == 0:
        raise DomainError("cannot factorise 0")
    return dict(_factor_tuple(n))


def mobius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorize(n).values())


def squarefree_split(l: int) -> tuple[int, int]:
    """Write ``l = l1 * l2**2`` with ``l1`` square-free; returns ``(l1, l2)``."""
    l1 = l2 = 1
    for p, e in factorize(l).items():
        if e & 1:
            l1 *= p
        l2 *= p ** (e // 2)
    return l1, l2


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**j for d in divs for j in range(e + 1)]
    return sorted(divs)


@dataclass(frozen=True)
class Discriminant:
    """An odd square-free ``d > 0``, standing for the character ``chi_{-8d}``."""

    d: int

    def __post_init__(self):
        if not isinstance(self.d, (int, np.integer)) or self.d < 1:
            raise DomainError(f"d must be a positive integer, got {self.d!r}")
        if self.d % 2 == 0:
            raise DomainError(f"d must be odd, got {self.d}")
        if not is_squarefree(int(self.d)):
            raise DomainError(f"d must be square-free, got {self.d}")
        object.__setattr__(self, "d", int(self.d))

    @property
    def fundamental(self) -> int:
        return -8 * self.d

    @property
    def conductor(self) -> int:
        return 8 * self.d

    def chi(self, n: int) -> int:
        return kronecker(-8 * self.d, n)

    @cached_property
    def table(self) -> np.ndarray:
        """``chi(n)`` for ``0 <= n < conductor`` as int8."""
        from .kernels import kronecker_table

        return kronecker_table(-8 * self.d, self.conductor)


@dataclass(frozen=True)
class SquarefreeSieve:
    """Immutable Mobius table ``mu[n]`` for ``0 <= n <= limit``."""

    limit: int
    mu: np.ndarray

    def __post_init__(self):
        self.mu.setflags(write=False)

    def mobius(self, n: int) -> int:
        return int(self.mu[n])

    def is_squarefree(self, n: int) -> bool:
        return self.mu[n] != 0

    def odd_squarefree(self, lo: int, hi: int) -> Iterator[int]:
        """Stream the odd square-free integers in ``[lo, hi]``."""
        if hi > self.limit:
            raise BudgetExceeded(f"sieve limit {self.limit} < {hi}")
        lo = max(int(lo), 1)
        start = lo | 1
        chunk = 1 << 16
        for base in range(start, int(hi) + 1, 2 * chunk):
            top = min(base + 2 * chunk, int(hi) + 1)
            window = self.mu[base:top:2]
            for off in np.flatnonzero(window):
                yield base + 2 * int(off)

    def odd_squarefree_array(self, lo: int, hi: int) -> np.ndarray:
        if hi > self.limit:
            raise BudgetExceeded(f"sieve limit {self.limit} < {hi}")
        lo = max(int(lo), 1) | 1
        idx = np.arange(lo, int(hi) + 1, 2)
        return idx[self.mu[idx] != 0]


def _small_primes(n: int) -> np.ndarray:
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags)


def sieve_squarefree(limit: int, block: int = 1 << 22) -> SquarefreeSieve:
    """Mobius values up to ``limit`` by a segmented sieve.

    Each block tracks the product of the small primes dividing ``n``; a
    leftover cofactor is a single prime above ``sqrt(limit)``.
    """
    limit = int(limit)
    if limit < 1:
        raise DomainError("limit must be >= 1")
    if limit > MAX_SIEVE_LIMIT:
        raise BudgetExceeded(
            f"sieve limit {limit} exceeds budget {MAX_SIEVE_LIMIT}"
        )
    try:
        mu = np.empty(limit + 1, dtype=np.int8)
    except MemoryError as exc:  # pragma: no cover - depends on host
        raise BudgetExceeded(f"cannot allocate sieve of size {limit}") from exc
    primes = _small_primes(math.isqrt(limit))
    for lo in range(0, limit + 1, block):
        hi = min(lo + block, limit + 1)
        seg = np.ones(hi - lo, dtype=np.int8)
        prod = np.ones(hi - lo, dtype=np.int64)
        for p in primes:
            p = int(p)
            first = (-lo) % p
            seg[first::p] *= -1
            prod[first::p] *= p
            p2 = p * p
            if p2 < hi:
                seg[(-lo) % p2 :: p2] = 0
        n = np.arange(lo, hi, dtype=np.int64)
        seg[prod < n] *= -1
        mu[lo:hi] = seg
    mu[0] = 0
    return SquarefreeSieve(limit=limit, mu=mu)


def m_y(d: int, Y: float) -> int:
    """``M_Y(d) = sum of mu(l) over l**2 | d with l <= Y``."""
    _, l2 = squarefree_split(d)
    return sum(mobius(l) for l in divisors(l2) if l <= Y)


def r_y(d: int, Y: float) -> int:
    """``R_Y(d) = sum of mu(l) over l**2 | d with l > Y``."""
    _, l2 = squarefree_split(d)
    return sum(mobius(l) for l in divisors(l2) if l > Y)


def r_shift(n: int, s: complex) -> complex:
    """``r_s(n) = sum over ab = n of (a/b)**s``; even in ``s``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return sum(complex(a * a / n) ** s for a in divisors(n))


def r_shift_table(n_max: int, s: complex) -> np.ndarray:
    """``r_s(n)`` for ``0 <= n <= n_max`` (entry 0 is 0) via a divisor sieve."""
    from .kernels import divisor_power_table

    return divisor_power_table(int(n_max), complex(s))


def gauss_sum_direct(k: int, n: int) -> complex:
    """``G_k(n)`` by literal summation over residues; the reference path."""
    if n < 1 or n % 2 == 0:
        raise DomainError("n must be a positive odd integer")
    total = sum(
        kronecker(a, n) * cmath.exp(2j * math.pi * a * k / n) for a in range(n)
    )
    eps = kronecker(-1, n)
    return ((1 - 1j) / 2 + eps * (1 + 1j) / 2) * total


def _gauss_prime_power(k: int, p: int, beta: int) -> float:
    if k == 0:
        alpha = math.inf
    else:
        alpha = 0
        kk = abs(k)
        while kk % p == 0:
            kk //= p
            alpha += 1
    if beta <= alpha:
        return 0.0 if beta & 1 else float(p**beta - p ** (beta - 1))
    if beta == alpha + 1:
        if beta % 2 == 0:
            return -float(p**alpha)
        return kronecker(k // p**alpha, p) * float(p**alpha) * math.sqrt(p)
    return 0.0


def gauss_sum(k: int, n: int) -> float:
    """``G_k(n)`` from multiplicativity and the prime-power table.

    The value is always real.
    """
    if n < 1 or n % 2 == 0:
        raise DomainError("n must be a positive odd integer")
    out = 1.0
    for p, beta in factorize(n).items():
        out *= _gauss_prime_power(int(k), p, beta)
        if out == 0.0:
            break
    return out
