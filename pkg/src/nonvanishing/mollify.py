"""The mollifier, its coefficient tables, and weighted averages over d.

M(s, d) = sum_{n <= M} lambda(n) chi_{-8d}(n) n^-s with
lambda(n) = mu(n) Q(log(M/n) / log M) for odd n and 0 for even n, where
Q(x) = P(x) on [0, b] and Q(x) = 1 on (b, 1].
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import kernels
from .arith import (Discriminant, SquarefreeSieve, gauss_sum, kronecker, m_y, mobius,
                    sieve_squarefree)
from .errors import BudgetExceeded, DomainError
from .special import SmoothWeight, fourier_tilde


def endpoint_defects(b: float, P, tol: float = 1e-12) -> list[str]:
    """Which of P(0)=0, P'(0)=0, P(b)=1, P'(b)=0 fail for coefficients ``P``.

    ``tol`` is relative to the size of P on [0, b].
    """
    c = np.asarray(P, dtype=float)
    tol = tol * (1 + float(np.sum(np.abs(c) * b ** np.arange(len(c)))))
    dc = npoly.polyder(c)
    checks = {
        "P(0)=0": npoly.polyval(0.0, c),
        "P'(0)=0": npoly.polyval(0.0, dc),
        "P(b)=1": npoly.polyval(b, c) - 1,
        "P'(b)=0": npoly.polyval(b, dc),
    }
    return [k for k, v in checks.items() if abs(v) > tol]


def hermite_polynomial(b: float, extra=()) -> tuple:
    """Coefficients in x of H(x/b), H(y) = 3y^2 - 2y^3 + y^2 (1-y)^2 sum_k extra[k] y^k.

    Every choice of ``extra`` meets the endpoint constraints; ``extra=()`` is the cubic.
    """
    h = np.array([0.0, 0.0, 3.0, -2.0])
    if len(extra):
        h = npoly.polyadd(h, npoly.polymul([0.0, 0.0, 1.0, -2.0, 1.0], np.asarray(extra, float)))
    return tuple(float(c) / b**k for k, c in enumerate(h))


@dataclass(frozen=True)
class MollifierShape:
    """Length ``M``, breakpoint ``b`` and polynomial ``P`` (coefficients, low order first)."""

    M: float
    b: float
    P: tuple

    def __post_init__(self):
        object.__setattr__(self, "P", tuple(float(c) for c in self.P))
        if self.M < 1:
            raise DomainError("mollifier length must be >= 1")
        if not 0 < self.b < 1:
            raise DomainError("breakpoint b must lie in (0, 1)")
        bad = endpoint_defects(self.b, self.P)
        if bad:
            raise DomainError("P violates " + ", ".join(bad))

    @classmethod
    def cubic(cls, M: float, b: float) -> "MollifierShape":
        """P(x) = 3 (x/b)^2 - 2 (x/b)^3."""
        return cls(M, b, hermite_polynomial(b))

    def with_length(self, M: float) -> "MollifierShape":
        return MollifierShape(M, self.b, self.P)

    def _piece(self, x, order: int):
        x = np.asarray(x, dtype=float)
        c = np.array(self.P)
        for _ in range(order):
            c = npoly.polyder(c)
        inner = npoly.polyval(x, c)
        outer = 1.0 if order == 0 else 0.0
        return np.where(x <= self.b, inner, outer)

    def Q(self, x):
        return self._piece(x, 0)

    def dQ(self, x):
        return self._piece(x, 1)

    def d2Q(self, x):
        return self._piece(x, 2)


@dataclass(frozen=True)
class LambdaTable:
    """lambda(n) for 0 <= n <= floor(M); entry 0 is unused."""

    M: float
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values)

    @classmethod
    def trivial(cls) -> "LambdaTable":
        return cls(1.0, np.array([0.0, 1.0]))


def build_lambda(shape: MollifierShape, sieve: SquarefreeSieve | None = None) -> LambdaTable:
    top = int(math.floor(shape.M))
    if top < 2:
        return LambdaTable(shape.M, np.array([0.0, 1.0]))
    if sieve is None:
        sieve = sieve_squarefree(top)
    if sieve.limit < top:
        raise BudgetExceeded(f"sieve limit {sieve.limit} < M = {top}")
    n = np.arange(top + 1)
    vals = np.zeros(top + 1)
    odd = n[1::2]
    x = np.log(shape.M / odd) / math.log(shape.M)
    vals[1::2] = sieve.mu[odd] * shape.Q(x)
    return LambdaTable(shape.M, vals)


def m_poly(s: complex, d, table: LambdaTable) -> complex:
    """sum_n lambda(n) chi_{-8d}(n) n^-s."""
    disc = d if isinstance(d, Discriminant) else Discriminant(int(d))
    n = table.support
    chi = disc.table[n % disc.conductor]
    return complex(np.sum(table.values[n] * chi * np.exp(-complex(s) * np.log(n))))


def b_coefficients(table: LambdaTable, n_max: int) -> np.ndarray:
    """Coefficients b(n) of L M - 1 with the character factored out.

    chi_{-8d} kills even n, so the L factor only carries odd n and
    b(n) = sum of lambda(m) over m | n for odd n, b(n) = 0 for even n.
    """
    out = kernels.divisor_sum(table.values, int(n_max))
    out[::2] = 0.0
    if n_max >= 1:
        out[1] -= 1.0
    return out


# ------------------------------------------------------------ averages over d


def odd_squarefree_window(X: float, sieve: SquarefreeSieve | None = None) -> np.ndarray:
    lo, hi = int(math.ceil(X)), int(math.floor(2 * X))
    if sieve is None:
        sieve = sieve_squarefree(hi)
    return sieve.odd_squarefree_array(lo, hi)


def s_weighted(values: Mapping[int, complex] | Callable[[int], complex], Phi: SmoothWeight,
               X: float, sieve: SquarefreeSieve | None = None) -> complex:
    """(1/X) sum over odd square-free d of a_d Phi(d/X), summed in increasing d."""
    ds = odd_squarefree_window(X, sieve)
    get = values if callable(values) else values.__getitem__
    a = np.array([get(int(d)) for d in ds], dtype=complex)
    total = np.sum(a * Phi(ds / X))  # numpy's pairwise summation, fixed order
    return complex(total) / X


@dataclass(frozen=True)
class MomentResult:
    value: float
    count: int
    failures: int
    X: float
    M: float


def _moment_term(args):
    d, s, table = args
    from .lfun import l_value

    try:
        v = l_value(s, d) * m_poly(s, d, table)
    except Exception:  # reported as a failure count, not raised
        return None
    return abs(v) ** 2


def moment_empirical(shifts, Phi: SmoothWeight, X: float, table: LambdaTable,
                     threads: int = 1, sieve: SquarefreeSieve | None = None) -> MomentResult:
    """S(|L(1/2+d1) M(1/2+d1)|^2; Phi) / S(1; Phi) over odd square-free d in [X, 2X]."""
    if abs(shifts.delta2 - shifts.delta1.conjugate()) > 1e-14:
        raise DomainError("moment_empirical needs delta2 = conj(delta1)")
    ds = odd_squarefree_window(X, sieve)
    w = Phi(ds / X)
    ds, w = ds[w > 0], w[w > 0]
    s = 0.5 + shifts.delta1
    jobs = [(int(d), s, table) for d in ds]
    if threads > 1:
        with ProcessPoolExecutor(threads) as ex:
            vals = list(ex.map(_moment_term, jobs, chunksize=32))
    else:
        vals = [_moment_term(j) for j in jobs]
    ok = np.array([v is not None for v in vals])
    v = np.array([x if x is not None else 0.0 for x in vals])
    num = np.sum(w[ok] * v[ok])
    den = np.sum(w[ok])
    return MomentResult(float(num / den), int(ok.sum()), int((~ok).sum()), X, table.M)


# ------------------------------------------------------------ Poisson summation


@dataclass(frozen=True)
class PoissonCheck:
    n: int
    lhs: float
    rhs: float
    k_max: int


def poisson_lhs(n: int, X: float, Y: float, F: Callable[[float], float]) -> float:
    """(1/X) sum over odd d of M_Y(d) (d/n) F(d/X)."""
    lo, hi = int(math.floor(X)), int(math.ceil(2 * X))
    terms = [m_y(d, Y) * kronecker(d, n) * F(d / X) for d in range(lo | 1, hi + 1, 2)]
    return math.fsum(terms) / X


def poisson_dual(n: int, X: float, Y: float, F: Callable[[float], float],
                 decay_tol: float = 1e-14, k_cap: int = 4000) -> PoissonCheck:
    """Both sides of the Poisson formula for the M_Y-weighted character sum.

    Dual side: (1/2n)(2/n) sum over alpha <= Y, (alpha, 2n) = 1, of
    mu(alpha)/alpha^2 sum_k (-1)^k G_k(n) F~(kX / (2 alpha^2 n)); the k-sum
    stops once |F~| stays below ``decay_tol`` for a full period of k mod n.
    """
    n = int(n)
    if n < 1 or n % 2 == 0:
        raise DomainError("n must be a positive odd integer")
    lhs = poisson_lhs(n, X, Y, F)
    total = []
    k_used = 0
    for alpha in range(1, int(Y) + 1):
        if math.gcd(alpha, 2 * n) != 1:
            continue
        mu_a = mobius(alpha)
        if mu_a == 0:
            continue
        scale = X / (2 * alpha * alpha * n)
        acc = [gauss_sum(0, n) * fourier_tilde(F, 0.0)]
        quiet = 0
        k = 1
        while k <= k_cap:
            fp, fm = fourier_tilde(F, k * scale), fourier_tilde(F, -k * scale)
            acc.append((-1) ** k * (gauss_sum(k, n) * fp + gauss_sum(-k, n) * fm))
            small = max(abs(fp), abs(fm))
            quiet = quiet + 1 if small < decay_tol else 0
            if quiet >= n + 2:
                break
            k += 1
        k_used = max(k_used, k)
        total.append(mu_a / alpha**2 * math.fsum(acc))
    rhs = kronecker(2, n) / (2 * n) * math.fsum(total)
    return PoissonCheck(n, lhs, rhs, k_used)
