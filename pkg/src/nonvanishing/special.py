"""Complex special functions, smooth weights and quadrature helpers.

Gamma uses the Lanczos approximation (Godfrey's g = 607/128 table), zeta and
Hurwitz zeta use Euler-Maclaurin summation. Both run in numpy's extended
precision so that phases of size ~10^3 (Im s ~ 200) survive the final
exponential with double-precision accuracy.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy import integrate

from .arith import squarefree_split
from .errors import ConvergenceError, DomainError

_LD = np.longdouble
_CLD = np.clongdouble
_PI = _LD("3.141592653589793238462643383279502884")
_LOG_2PI_HALF = _LD("0.918938533204672741780329736405617640")  # log(2 pi)/2

_LANCZOS_G = _LD(607) / _LD(128)
_LANCZOS = [
    _LD(c)
    for c in (
        "0.99999999999999709182",
        "57.156235665862923517",
        "-59.597960355475491248",
        "14.136097974741747174",
        "-0.49191381609762019978",
        ".33994649984811888699e-4",
        ".46523628927048575665e-4",
        "-.98374475304879564677e-4",
        ".15808870322491248884e-3",
        "-.21026444172410488319e-3",
        ".21743961811521264320e-3",
        "-.16431810653676389022e-3",
        ".84418223983852743293e-4",
        "-.26190838401581408670e-4",
        ".36899182659531622704e-5",
    )
]

_EM_MAX = 40


def _bernoulli_ratios(jmax: int) -> list[Fraction]:
    """Exact B_2j/(2j)! for j = 0..jmax (Akiyama-Tanigawa)."""
    n_max = 2 * jmax
    row = [Fraction(0)] * (n_max + 1)
    bern = []
    for m in range(n_max + 1):
        row[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            row[j - 1] = j * (row[j - 1] - row[j])
        bern.append(row[0])
    return [bern[2 * j] / math.factorial(2 * j) for j in range(jmax + 1)]


def _to_ld(x: Fraction) -> np.longdouble:
    with localcontext() as ctx:
        ctx.prec = 40
        return _LD(str(Decimal(x.numerator) / Decimal(x.denominator)))


_EM_EXACT = _bernoulli_ratios(_EM_MAX)
EM_COEFF_LD = [_to_ld(c) for c in _EM_EXACT]
EM_COEFF = np.array([float(c) for c in _EM_EXACT])
EM_COEFF[0] = 0.0


# --------------------------------------------------------------------- gamma


def _is_pole(z) -> np.ndarray:
    z = np.asarray(z)
    return (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))


def _log_sin_pi(z: np.ndarray) -> np.ndarray:
    """A branch of log sin(pi z), stable for large |Im z|."""
    n = np.round(z.real)
    r = z - n
    sign_flip = (n.astype(np.int64) & 1).astype(bool)
    upper = r.imag >= 0
    w = np.where(upper, r, np.conj(r))
    # sin(pi w) = e^{-i pi w} (e^{2 i pi w} - 1) / (2i)
    val = -1j * _PI * w + np.log((np.exp(2j * _PI * w) - 1) / _CLD(2j))
    val = np.where(upper, val, np.conj(val))
    return val + np.where(sign_flip, 1j * _PI, 0)


def _loggamma_right(z: np.ndarray) -> np.ndarray:
    zz = z - 1
    acc = _CLD(_LANCZOS[0]) + 0 * zz
    for k in range(1, len(_LANCZOS)):
        acc = acc + _LANCZOS[k] / (zz + k)
    t = zz + _LANCZOS_G + _LD(0.5)
    return _LOG_2PI_HALF + (zz + _LD(0.5)) * np.log(t) - t + np.log(acc)


def loggamma_ext(z) -> np.ndarray:
    """A logarithm of Gamma(z) in extended precision (not always the principal branch)."""
    z = np.asarray(z, dtype=_CLD)
    if np.any(_is_pole(z)):
        raise DomainError("Gamma has a pole at non-positive integers")
    left = z.real < 0.5
    out = np.empty_like(z)
    if np.any(~left):
        out[~left] = _loggamma_right(z[~left])
    if np.any(left):
        zl = z[left]
        out[left] = np.log(_PI) - _log_sin_pi(zl) - _loggamma_right(1 - zl)
    return out


def gamma(s):
    """Gamma(s) for complex ``s``; scalar in, scalar out."""
    arr = np.asarray(s)
    val = np.exp(loggamma_ext(np.atleast_1d(arr))).astype(np.complex128)
    return complex(val[0]) if arr.ndim == 0 else val


def loggamma(s):
    arr = np.asarray(s)
    val = loggamma_ext(np.atleast_1d(arr)).astype(np.complex128)
    return complex(val[0]) if arr.ndim == 0 else val


def gamma_delta(s: complex, delta: complex) -> complex:
    """Gamma(3/4 + s/2 + delta/2) Gamma(3/4 + s/2 - delta/2)."""
    a = 0.75 + s / 2
    lg = loggamma_ext(np.array([a + delta / 2, a - delta / 2]))
    return complex(np.exp(lg[0] + lg[1]))


# ---------------------------------------------------------------------- zeta


def _pochhammer_abs(s: complex, n: int) -> float:
    out = 1.0
    for k in range(n):
        out *= abs(s + k)
    return out


def em_plan(s: complex, tol: float, scale: float = 1.0, n_min: int = 1) -> tuple[int, int]:
    """Cut-off ``N`` and order ``m`` for an Euler-Maclaurin tail starting at ``N``.

    Uses the Backlund bound |R_m| <= |T_(m+1)| |s+2m+1| / (Re s + 2m + 1) on the
    remainder after ``m`` correction terms; ``scale`` multiplies the bound
    (e.g. ``q^(1-sigma)`` for a character sum mod ``q``).
    """
    sigma = float(np.real(s))
    N = max(n_min, 1, int(-sigma) + 2)
    while True:
        term_base = N ** (-sigma)
        for m in range(1, _EM_MAX):
            nxt = abs(EM_COEFF[m + 1]) * _pochhammer_abs(s, 2 * m + 1) * N ** (-2 * m - 1)
            denom = sigma + 2 * m + 1
            if denom <= 0:
                continue
            bound = nxt * term_base * abs(s + 2 * m + 1) / denom * scale
            if bound <= tol:
                return N, m
            if m > 2 and nxt > abs(EM_COEFF[m]) * _pochhammer_abs(s, 2 * m - 1) * N ** (1 - 2 * m):
                break
        N += max(1, N // 4)
        if N > 10**8:
            raise ConvergenceError("no Euler-Maclaurin plan within budget")


def em_coefficients(s: complex, m: int) -> np.ndarray:
    """``B_2j/(2j)! * s(s+1)...(s+2j-2)`` for ``j = 1..m``."""
    out = np.empty(m, dtype=np.complex128)
    poch = complex(s)
    for j in range(1, m + 1):
        out[j - 1] = EM_COEFF[j] * poch
        poch *= (s + 2 * j - 1) * (s + 2 * j)
    return out


def _em_tail(s: _CLD, base: _LD, m: int) -> _CLD:
    """Euler-Maclaurin value of sum_{k>=0} (base + k)^(-s) with m corrections."""
    lb = np.log(base)
    p = np.exp(-s * lb)
    tail = p * base / (s - 1) + p / 2
    poch = s
    inv2 = 1 / (base * base)
    pw = p / base
    for j in range(1, m + 1):
        tail = tail + EM_COEFF_LD[j] * poch * pw
        poch = poch * (s + 2 * j - 1) * (s + 2 * j)
        pw = pw * inv2
    return tail


def hurwitz_zeta(s: complex, a: float, tol: float = 1e-16) -> complex:
    """zeta(s, a) = sum_{k>=0} (k + a)^(-s) for 0 < a <= 1."""
    if s == 1:
        raise DomainError("zeta has a pole at s = 1")
    if not 0 < a <= 1:
        raise DomainError("Hurwitz parameter must lie in (0, 1]")
    N, m = em_plan(s, tol * 1e-2, n_min=2)
    sc = _CLD(s)
    k = np.arange(N, dtype=_LD) + _LD(a)
    head = np.sum(np.exp(-sc * np.log(k)))
    return complex(head + _em_tail(sc, _LD(N) + _LD(a), m))


def zeta(s: complex, tol: float = 1e-16) -> complex:
    """Riemann zeta by Euler-Maclaurin on the integers."""
    if s == 1:
        raise DomainError("zeta has a pole at s = 1")
    N, m = em_plan(s, tol * 1e-2, n_min=2)
    sc = _CLD(s)
    n = np.arange(1, N, dtype=_LD)
    head = np.sum(np.exp(-sc * np.log(n)))
    return complex(head + _em_tail(sc, _LD(N), m))


def big_z(s: complex, w: complex) -> complex:
    """zeta(s - 2w) zeta(s) zeta(s + 2w)."""
    for z in (s - 2 * w, s, s + 2 * w):
        if z == 1:
            raise DomainError(f"Z(s;w) has a pole: argument {z} hits 1")
    return zeta(s - 2 * w) * zeta(s) * zeta(s + 2 * w)


# --------------------------------------------------------------- quadrature


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_depth: int = 12
    contour_truncation: float | None = None  # None: choose T from the decay

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise DomainError("tolerances must be positive")
        if self.max_depth < 1:
            raise DomainError("max_depth must be >= 1")


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def gl_panels(edges: np.ndarray):
    """Nodes and weights of 20-point Gauss-Legendre on each panel of ``edges``."""
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1, None], edges[1:, None]
    half = (b - a) / 2
    x = (a + b) / 2 + half * _GL_NODES[None, :]
    w = half * _GL_WEIGHTS[None, :]
    return x.ravel(), w.ravel()


def gl_integrate(f: Callable, breakpoints, spec: QuadratureSpec = QuadratureSpec(),
                 return_error: bool = False):
    """Composite Gauss-Legendre over ``breakpoints``, halving panels until settled.

    ``f`` must accept a numpy array. Raises ConvergenceError (with the best
    estimate attached) if ``max_depth`` halvings do not meet the tolerance.
    """
    edges = np.asarray(breakpoints, dtype=float)
    x, w = gl_panels(edges)
    prev = np.sum(w * f(x))
    for _ in range(spec.max_depth):
        mid = (edges[:-1] + edges[1:]) / 2
        edges = np.sort(np.concatenate([edges, mid]))
        x, w = gl_panels(edges)
        cur = np.sum(w * f(x))
        err = abs(cur - prev)
        if err <= max(spec.abs_tol, spec.rel_tol * abs(cur)):
            return (cur, err) if return_error else cur
        prev = cur
    raise ConvergenceError("Gauss-Legendre refinement did not settle", cur, err)


# ----------------------------------------------------------- smooth weights


def _logistic_derivs(x: np.ndarray, order: int):
    """psi(x) = logistic(1/(1-x) - 1/x) and its first ``order`` derivatives."""
    x = np.asarray(x, dtype=float)
    out = [np.zeros_like(x) for _ in range(order + 1)]
    out[0] = np.where(x >= 0.998, 1.0, 0.0)
    inside = (x > 0.002) & (x < 0.998)
    if not inside.any():
        return out
    xi = x[inside]
    u = 1 / (1 - xi) - 1 / xi
    sg = 0.5 * (1 + np.tanh(u / 2))
    s1 = sg * (1 - sg)
    s2 = s1 * (1 - 2 * sg)
    s3 = s1 * (1 - 6 * sg + 6 * sg * sg)
    u1 = 1 / (1 - xi) ** 2 + 1 / xi**2
    u2 = 2 / (1 - xi) ** 3 - 2 / xi**3
    u3 = 6 / (1 - xi) ** 4 + 6 / xi**4
    vals = [sg, s1 * u1, s2 * u1**2 + s1 * u2, s3 * u1**3 + 3 * s2 * u1 * u2 + s1 * u3]
    for j in range(order + 1):
        out[j][inside] = vals[j]
    return out


@dataclass(frozen=True)
class SmoothWeight:
    """Bump supported in (1, 2), equal to 1 on (1+eps, 2-eps)."""

    eps: float = 0.05

    def __post_init__(self):
        if not 0 < self.eps <= 0.5:
            raise DomainError("eps must lie in (0, 1/2]")

    def __call__(self, t):
        return self.derivative(t, 0)

    def derivative(self, t, j: int = 0):
        """Phi^(j)(t) for 0 <= j <= 3 by the closed-form chain rule."""
        if not 0 <= j <= 3:
            raise DomainError("derivatives available up to order 3")
        t = np.asarray(t, dtype=float)
        e = self.eps
        A = _logistic_derivs((t - 1) / e, j)
        B = _logistic_derivs((2 - t) / e, j)
        out = np.zeros_like(t)
        for k in range(j + 1):
            out = out + math.comb(j, k) * A[k] * B[j - k] * (1 / e) ** k * (-1 / e) ** (j - k)
        return out

    @property
    def breakpoints(self) -> np.ndarray:
        e = self.eps
        return np.array([1.0, 1 + e / 2, 1 + e, 2 - e, 2 - e / 2, 2.0])


def phi_norm(Phi: SmoothWeight, nu: int, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """max over 0 <= j <= nu of the integral of |Phi^(j)| over [1, 2]."""
    return max(
        float(gl_integrate(lambda t, j=j: np.abs(Phi.derivative(t, j)), Phi.breakpoints, spec))
        for j in range(nu + 1)
    )


def mellin_weight(w: complex, Phi: SmoothWeight, spec: QuadratureSpec = QuadratureSpec()) -> complex:
    """Phi-check(w) = integral of Phi(y) y^w dy over [1, 2]."""
    if np.real(w) <= -1:
        raise DomainError("Mellin weight needs Re w > -1")
    # oscillation y^(i Im w) needs ~|Im w| log 2 / pi half-periods
    n_osc = int(abs(np.imag(w)) * math.log(2) / math.pi) + 1
    edges = np.unique(np.concatenate([Phi.breakpoints, np.linspace(1, 2, n_osc + 1)]))
    return complex(gl_integrate(lambda y: Phi(y) * np.exp(w * np.log(y)), edges, spec))


def fourier_tilde(F: Callable[[float], float], xi: float, lo: float = 1.0, hi: float = 2.0) -> float:
    """F-tilde(xi) = integral of (cos(2 pi x xi) + sin(2 pi x xi)) F(x) dx."""
    if xi == 0:
        return integrate.quad(F, lo, hi, limit=400, epsabs=1e-15)[0]
    om = 2 * math.pi * xi
    c = integrate.quad(F, lo, hi, weight="cos", wvar=om, limit=400, epsabs=1e-15)[0]
    s = integrate.quad(F, lo, hi, weight="sin", wvar=om, limit=400, epsabs=1e-15)[0]
    return c + s


# ---------------------------------------------------------------------- eta


def _primes_upto(n: int) -> np.ndarray:
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags)


def _clog1p(z: np.ndarray) -> np.ndarray:
    """log(1 + z) for complex z, accurate for small |z| (numpy's is not)."""
    re, im = z.real, z.imag
    return 0.5 * np.log1p(2 * re + re * re + im * im) + 1j * np.arctan2(im, 1 + re)


def _cexpm1(z: np.ndarray) -> np.ndarray:
    re, im = z.real, z.imag
    return np.expm1(re) * np.cos(im) - 2 * np.sin(im / 2) ** 2 + 1j * np.exp(re) * np.sin(im)


def _eta_generic_excess(p: np.ndarray, s: complex, w: complex) -> np.ndarray:
    """Factor at odd p not dividing l, minus 1 (kept separate to avoid cancellation)."""
    lp = np.log(p.astype(float))
    x = np.exp(-s * lp)
    y = 1.0 / p
    A = np.exp(2 * w * lp) + np.exp(-2 * w * lp)
    return (-x * x - x * y * (A + 1) + x * x * y * (1 + A) - x**3 * y) / (1 + y)


def _eta_log_zeta_factor(p: np.ndarray, s: complex, w: complex) -> np.ndarray:
    """log of the Euler factors of 1/(zeta(2s) zeta(s+1) zeta(s+1+2w) zeta(s+1-2w)) at p."""
    lp = np.log(p.astype(float))
    out = np.zeros(len(p), dtype=complex)
    for z in (2 * s, s + 1, s + 1 + 2 * w, s + 1 - 2 * w):
        out += _clog1p(-np.exp(-z * lp))
    return out


@functools.lru_cache(maxsize=256)
def _eta_base(w: complex, s: complex, tol: float, p_max: int):
    """eta_w(s; 1) with its tail bound and the prime cut-off used."""
    sigma, rho = s.real, abs(w.real)
    alpha = min(2 * sigma + 1 - 2 * rho, sigma + 2 - 2 * rho)
    # factor at 2, with the symmetric reading of its last term
    two = (1 - 2.0 ** (-s - 2 * w)) * (1 - 2.0 ** (-s)) * (1 - 2.0 ** (-s + 2 * w))
    zeta_part = 1.0
    for z in (2 * s, s + 1, s + 1 + 2 * w, s + 1 - 2 * w):
        zeta_part /= zeta(z) * (1 - 2.0 ** (-z))
    P = 10**4
    while True:
        p = _primes_upto(P)[1:]
        log_g = _clog1p(_eta_generic_excess(p, s, w)) - _eta_log_zeta_factor(p, s, w)
        block = p > P // 2
        C = np.max(np.abs(_cexpm1(log_g[block])) * p[block].astype(float) ** alpha)
        tail_sum = 2 * C * P ** (1 - alpha) / (alpha - 1)
        tail = math.expm1(tail_sum)
        if tail <= tol or P >= p_max:
            break
        P *= 10
    value = complex(two * zeta_part * np.exp(np.sum(log_g)))
    return value, tail, P


def eta(w: complex, s: complex, l: int, tol: float = 1e-10, p_max: int = 10**7,
        return_bound: bool = False):
    """The Euler product eta_w(s; l).

    Convergence is accelerated by dividing out the Euler factors of
    zeta(2s) zeta(s+1) zeta(s+1+2w) zeta(s+1-2w); each remaining factor is
    1 + O(p^-alpha) with alpha = min(2 sigma + 1 - 2 rho, sigma + 2 - 2 rho),
    rho = |Re w|, and the tail is bounded from a majorant fitted on the last
    block of primes (with a safety factor 2).
    """
    l = int(l)
    if l < 1 or l % 2 == 0:
        raise DomainError("l must be a positive odd integer")
    sigma, rho = float(np.real(s)), abs(float(np.real(w)))
    if rho > 0.25 or sigma <= 0.5:
        raise DomainError("eta_w(s;l) needs |Re w| <= 1/4 and Re s > 1/2")
    value, tail, P = _eta_base(complex(w), complex(s), float(tol), int(p_max))
    value *= eta_l_correction(w, s, l, P)
    if tail > tol:
        raise ConvergenceError("eta tail bound above tolerance", complex(value), tail * abs(value))
    if return_bound:
        return complex(value), tail * abs(value)
    return complex(value)


def eta_l_correction(w: complex, s: complex, l: int, P: int) -> complex:
    """eta_w(s; l) / eta_w(s; 1) when the generic product ran over primes <= P.

    Only the factors at primes dividing ``l`` differ.
    """
    l1, _ = squarefree_split(l)
    out = 1.0
    for q in sorted({int(f) for f in _divisor_primes(l)}):
        qa = np.array([q])
        generic = 1 + _eta_generic_excess(qa, s, w)[0]
        if q > P:
            # only the zeta Euler factor of q entered the product
            generic = np.exp(_eta_log_zeta_factor(qa, s, w)[0])
        special = (q / (q + 1)) * (1 - q ** (-s) if l1 % q == 0 else 1 - q ** (-2 * s))
        out *= special / generic
    return complex(out)


def _divisor_primes(l: int):
    from .arith import factorize

    return factorize(l).keys()
