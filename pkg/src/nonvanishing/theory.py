"""Analytic main terms and the pipeline that turns them into a proportion.

The limiting weight V(u, v) comes from the mollified second moment with
delta_1 = (u + iv)/log X, log X = rho log M:

    V(u, v) = 1 + rho e^-u (sinh u/u - sin v/v)
                  * int_0^b e^{-2u(1-x)/rho} |Q'(x) + rho Q''(x) / (2(u + iv))|^2 dx.

Feeding log V into the boundary integrals of the zero-counting box and
dividing by the count 8 S sinh(pi R / 2S) forced by a real zero gives the
constant c bounding the proportion of d whose L-function may vanish on
[1/2, 1].
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import integrate

from .arith import r_shift, squarefree_split
from .errors import ConvergenceError, DomainError
from .mollify import MollifierShape, endpoint_defects, hermite_polynomial
from .special import (QuadratureSpec, SmoothWeight, _eta_base, big_z, eta_l_correction, gamma_delta,
                      mellin_weight, zeta)

# below this |argument| the removable singularities are evaluated by series
SERIES_RADIUS = 1e-3

_GL_X, _GL_W = np.polynomial.legendre.leggauss(40)


@dataclass(frozen=True)
class BoundParams:
    """Box shape (R, S), mollifier breakpoint b and polynomial P, rho = log X / log M."""

    R: float
    S: float
    b: float
    P: tuple
    rho: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "P", tuple(float(c) for c in self.P))
        if self.R <= 0 or self.S <= 0:
            raise DomainError("R and S must be positive")
        if not 0 < self.b < 1:
            raise DomainError("b must lie in (0, 1)")
        if self.rho <= 0:
            raise DomainError("rho must be positive")
        bad = endpoint_defects(self.b, self.P)
        if bad:
            raise DomainError("P violates " + ", ".join(bad))

    @staticmethod
    def default_S(b: float) -> float:
        return math.pi / (2 * (1 - b))

    @classmethod
    def reference(cls) -> "BoundParams":
        """R = 6.8, b = 0.64, the cubic P and S = pi / (2 (1 - b))."""
        b = 0.64
        return cls(R=6.8, S=cls.default_S(b), b=b, P=hermite_polynomial(b), rho=2.0)

    def with_(self, **kw) -> "BoundParams":
        cur = dict(R=self.R, S=self.S, b=self.b, P=self.P, rho=self.rho)
        cur.update(kw)
        return BoundParams(**cur)

    def products(self):
        """Factor pairs of Q'Q', Q'Q'', Q''Q'' on [0, b]."""
        return _products(self.P)


def _products(P):
    d1 = npoly.polyder(np.array(P, dtype=float))
    d2 = npoly.polyder(d1)
    return (d1, d1), (d1, d2), (d2, d2)


def _graded_edges(c: float, b: float) -> np.ndarray:
    """Panels on [0, b] refined geometrically towards the end where e^{cx} peaks."""
    if abs(c) * b <= 2:
        return np.array([0.0, b])
    steps = [0.0]
    h = 1.0 / abs(c)
    while h < b:
        steps.append(h)
        h *= 2
    steps.append(b)
    t = np.array(steps)
    return np.sort(b - t) if c > 0 else t


def _exp_poly_integral(c, pair, b: float) -> np.ndarray:
    """int_0^b e^{-c(1-x)} p(x) q(x) dx for each entry of ``c``, ``pair = (p, q)``.

    The factors are evaluated separately: Q' vanishes at b and its square
    would lose digits there.

    Gauss-Legendre on panels graded towards the boundary layer, so there is
    no cancellation when ``p`` vanishes to high order where the weight peaks.
    """
    c = np.atleast_1d(np.asarray(c, dtype=float))
    out = np.empty_like(c)
    for i, ci in enumerate(c):
        e = _graded_edges(ci, b)
        lo, hi = e[:-1, None], e[1:, None]
        x = (0.5 * (hi - lo) * (_GL_X + 1) + lo).ravel()
        w = (0.5 * (hi - lo) * _GL_W).ravel()
        px = npoly.polyval(x, pair[0]) * npoly.polyval(x, pair[1])
        out[i] = np.sum(w * px * np.exp(-ci * (1 - x)))
    return out


def _exp_sinhc(u):
    """e^-u sinh(u)/u."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < SERIES_RADIUS
    safe = np.where(small, 1.0, u)
    direct = -np.expm1(-2 * safe) / (2 * safe)
    series = 1 - u + 2 * u**2 / 3 - u**3 / 3 + 2 * u**4 / 15
    return np.where(small, series, direct)


def _sinc(v):
    """sin(v)/v."""
    v = np.asarray(v, dtype=float)
    return np.sinc(v / np.pi)


def _bracket_over_r2(u, v, terms: int = 14):
    """(sinh u/u - sin v/v) / (u^2 + v^2) for u^2 + v^2 < 1, by its power series.

    With A = u^2, B = -v^2 the k-th term is (A^k - B^k) / ((A - B) (2k+1)!).
    """
    A, B = np.asarray(u, float) ** 2, -(np.asarray(v, float) ** 2)
    total = np.zeros(np.broadcast(A, B).shape)
    for k in range(1, terms + 1):
        h = sum(A ** (k - 1 - j) * B**j for j in range(k))
        total = total + h / math.factorial(2 * k + 1)
    return total


def v_minus_one(u, v, params: BoundParams):
    """V(u, v) - 1, vectorised over ``u`` and ``v``; always >= 0."""
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    shape = u.shape
    u, v = u.ravel(), v.ravel()
    rho = params.rho
    r2 = u * u + v * v
    small = r2 < 1
    # E = e^-u (sinhc u - sinc v), F = E / r2
    E = _exp_sinhc(u) - np.exp(-u) * _sinc(v)
    F = np.empty_like(E)
    F[~small] = E[~small] / r2[~small]
    F[small] = np.exp(-u[small]) * _bracket_over_r2(u[small], v[small])
    E[small] = F[small] * r2[small]
    p11, p12, p22 = params.products()
    c = 2 * u / rho
    I11 = _exp_poly_integral(c, p11, params.b)
    I12 = _exp_poly_integral(c, p12, params.b)
    I22 = _exp_poly_integral(c, p22, params.b)
    out = rho * (E * I11 + F * (rho * u * I12 + rho * rho / 4 * I22))
    return out.reshape(shape)


def v_func(u, v, params: BoundParams):
    """The limiting mollified moment V(u, v)."""
    out = 1 + v_minus_one(u, v, params)
    return float(out) if np.ndim(out) == 0 else out


def log_v(u, v, params: BoundParams):
    out = np.log1p(v_minus_one(u, v, params))
    return float(out) if np.ndim(out) == 0 else out


# ------------------------------------------------------------- moment main term


def _regime(shifts, X: float, eps: float):
    d1 = complex(shifts.delta1)
    if abs(complex(shifts.delta2) - d1.conjugate()) > 1e-14:
        raise DomainError("the main term needs delta2 = conj(delta1)")
    lx = math.log(X)
    if abs(d1) < eps / lx:
        raise DomainError(f"|delta1| = {abs(d1):.3g} below eps/log X = {eps / lx:.3g}")
    if d1.real < -1 / (eps * lx):
        raise DomainError(f"Re delta1 = {d1.real:.3g} below -1/(eps log X)")
    return d1


def moment_main_term(shifts, X: float, M: float, shape: MollifierShape, eps: float = 0.05) -> float:
    """Main term of the mean of |L M(1/2 + delta1)|^2 over d, delta2 = conj(delta1).

    1 + [(1 - Y^-2tau)/(2 tau log M) - Y^-tau (Y^delta - Y^-delta)/(2 delta log M)]
      * int_0^b M^{-2 tau (1-x)} |Q'(x) + Q''(x) / (2 delta1 log M)|^2 dx,   Y = 8X/pi.
    """
    if X <= 1 or M <= 1:
        raise DomainError("need X > 1 and M > 1")
    d1 = _regime(shifts, X, eps)
    A, L = math.log(8 * X / math.pi), math.log(M)
    tau, y = d1.real, d1.imag
    bracket = (A / L) * (float(_exp_sinhc(tau * A)) - math.exp(-tau * A) * float(_sinc(y * A)))
    z = 1 / (2 * d1 * L)
    c = 2 * tau * L
    I11, I12, I22 = (_exp_poly_integral(c, pr, shape.b)[0] for pr in _products(shape.P))
    integral = I11 + 2 * z.real * I12 + abs(z) ** 2 * I22
    return 1 + bracket * integral


# ---------------------------------------------------------------- the bound


@dataclass(frozen=True)
class JIntegrals:
    J1: float
    J2: float
    J2_tail: float
    U_max: float
    error: float


def _quad(f, a, b, q: QuadratureSpec, what: str):
    val, err = integrate.quad(f, a, b, epsabs=q.abs_tol, epsrel=q.rel_tol, limit=1000)
    if not np.isfinite(val) or err > max(1e3 * q.abs_tol, 1e3 * q.rel_tol * abs(val)):
        raise ConvergenceError(f"{what} did not converge", val, err)
    return val, err


def j_integrals(params: BoundParams, q: QuadratureSpec = QuadratureSpec(),
                U_max: float = 400.0) -> JIntegrals:
    """J1 on the left edge and J2 on the top edge of the rescaled box.

    J1 = int_0^S cos(pi t/2S) log V(-R, t) dt,
    J2 = int_0^inf sinh(pi u/2S) log V(u - R, S) du.
    When S = pi/(2(1-b)) the J2 integrand decays only like (u - R)^-4, so the
    range beyond ``U_max`` is added as C/(3 (U_max - R)^3), C fitted at U_max.
    """
    R, S = params.R, params.S
    if U_max <= R + 1:
        raise DomainError("U_max must exceed R + 1")
    k = math.pi / (2 * S)
    J1, e1 = _quad(lambda t: math.cos(k * t) * log_v(-R, t, params), 0.0, S, q, "J1")

    def g(u):
        return math.sinh(k * u) * log_v(u - R, S, params)

    # split at a few scales so quad resolves the slow tail
    edges = [0.0, R, 2 * R, 5 * R, 20 * R, U_max]
    edges = sorted({min(max(e, 0.0), U_max) for e in edges})
    parts = [_quad(g, a, b, q, "J2") for a, b in zip(edges[:-1], edges[1:])]
    J2 = math.fsum(p[0] for p in parts)
    C = g(U_max) * (U_max - R) ** 4
    tail = C / (3 * (U_max - R) ** 3)
    err = e1 + sum(p[1] for p in parts) + 0.05 * abs(tail)
    return JIntegrals(J1, J2 + tail, tail, U_max, err)


@dataclass(frozen=True)
class BoundReport:
    params: BoundParams
    J1: float
    J2: float
    threshold: float
    c: float
    error: float
    J2_tail: float = 0.0
    U_max: float = 0.0

    @property
    def proportion_without_real_zero(self) -> float:
        return 1 - self.c


def bound_report(params: BoundParams, q: QuadratureSpec = QuadratureSpec()) -> BoundReport:
    from .selberg import real_zero_threshold

    J = j_integrals(params, q)
    thr = real_zero_threshold(params.R, params.S)
    return BoundReport(params, J.J1, J.J2, thr, (J.J1 + J.J2) / thr, J.error / thr, J.J2_tail, J.U_max)


def bound_constant(params: BoundParams, q: QuadratureSpec = QuadratureSpec()) -> float:
    """c = (J1 + J2) / (8 S sinh(pi R / 2S))."""
    return bound_report(params, q).c


# ------------------------------------------------------------------ scanning


@dataclass(frozen=True)
class ScanRow:
    R: float
    b: float
    S: float
    extra: tuple
    c: float
    pinned: bool = False

    @property
    def P(self) -> tuple:
        return hermite_polynomial(self.b, self.extra)


@dataclass(frozen=True)
class ScanResult:
    rows: list
    skipped: list = field(default_factory=list)


def _scan_point(args):
    R, b, extra, rho, q, pinned = args
    p = BoundParams(R, BoundParams.default_S(b), b, hermite_polynomial(b, extra), rho)
    return ScanRow(R, b, p.S, tuple(extra), bound_constant(p, q), pinned)


def param_scan(R_grid, b_grid, P_family=((),), q: QuadratureSpec = QuadratureSpec(),
               rho: float = 2.0, explicit=(), threads: int = 1) -> ScanResult:
    """bound_constant over R x b x polynomial, sorted by c.

    ``P_family`` holds coefficient tuples ``extra`` of the Hermite-constrained
    family (see ``hermite_polynomial``), so every member is admissible.
    ``explicit`` holds polynomials H in y = x/b given directly; those failing
    the endpoint constraints are skipped with the reason. The reference point
    (R, b) = (6.8, 0.64) with the cubic is always evaluated and marked pinned.
    """
    R_grid, b_grid, P_family = list(R_grid), list(b_grid), [tuple(e) for e in P_family]
    if not R_grid or not b_grid or not (P_family or explicit):
        raise DomainError("empty scan grid")
    skipped = []
    for H in explicit:
        bad = endpoint_defects(1.0, H)
        if bad:
            skipped.append((tuple(H), "violates " + ", ".join(bad)))
            continue
        # H(y) - (3y^2 - 2y^3) is divisible by y^2 (1-y)^2; recover ``extra``
        diff = npoly.polysub(np.asarray(H, float), [0.0, 0.0, 3.0, -2.0])
        quot, rem = npoly.polydiv(diff, [0.0, 0.0, 1.0, -2.0, 1.0]) if len(diff) > 4 else ([], [0])
        P_family.append(tuple(np.round(np.atleast_1d(quot), 14)) if np.any(diff) else ())
    ref = BoundParams.reference()
    jobs = [(R, b, e, rho, q, (R, b, e) == (ref.R, ref.b, ()))
            for R in R_grid for b in b_grid for e in P_family]
    if not any(j[-1] for j in jobs):
        jobs.append((ref.R, ref.b, (), rho, q, True))
    if threads > 1:
        with ProcessPoolExecutor(threads) as ex:
            rows = list(ex.map(_scan_point, jobs))
    else:
        rows = [_scan_point(j) for j in jobs]
    rows.sort(key=lambda r: (r.c, r.R, r.b, r.extra, r.pinned))
    return ScanResult(rows, skipped)


# ------------------------------------------------------- low-lying zero density


def ks_density_integral(S: float, q: QuadratureSpec = QuadratureSpec()) -> float:
    """int_0^{S/2pi} cos(pi^2 x/S) (1 - sin(2 pi x)/(2 pi x)) dx."""
    if S <= 0:
        raise DomainError("S must be positive")

    def f(x):
        y = 2 * math.pi * x
        dens = y * y / 6 - y**4 / 120 if y < SERIES_RADIUS else 1 - math.sin(y) / y
        return math.cos(math.pi**2 * x / S) * dens

    val, _ = _quad(f, 0.0, S / (2 * math.pi), q, "density integral")
    return val


# ---------------------------------------------------- twisted first moment term


class _Prop23:
    """The l-independent factors of the twisted first-moment main term."""

    def __init__(self, shifts, X: float, Psi, q: QuadratureSpec, eta_tol: float):
        tau, delta = complex(shifts.tau), complex(shifts.delta)
        dist = min(abs(tau), abs(delta), abs(tau - delta), abs(tau + delta))
        if dist < 1e-6:
            raise DomainError(
                f"shifts lie {dist:.3g} from the singular set tau, delta, tau +- delta = 0")
        self.X = X
        self.terms = []
        for a, w in ((tau, delta), (delta, tau)):
            for mu in (1, -1):
                s = mu * a
                base = (gamma_delta(s, w) * (8 * X / math.pi) ** s * mellin_weight(s, Psi, q)
                        * big_z(1 + 2 * s, w))
                e1, _, P = _eta_base(complex(w), complex(1 + 2 * s), float(eta_tol), 10**7)
                self.terms.append((s, w, base * e1, P))
        self.c0 = 2 / (3 * complex(zeta(2)).real)

    def __call__(self, l: int) -> complex:
        l1, _ = squarefree_split(l)
        out = []
        for s, w, base, P in self.terms:
            out.append(r_shift(l1, w) * l1 ** (-s) * base * eta_l_correction(w, 1 + 2 * s, l, P))
        total = complex(math.fsum(t.real for t in out), math.fsum(t.imag for t in out))
        return self.c0 / math.sqrt(l1) * total


def prop23_main_term(l: int, shifts, X: float, Psi: SmoothWeight,
                     q: QuadratureSpec = QuadratureSpec(), eta_tol: float = 1e-10) -> complex:
    """Main term of the Psi-weighted average of (-8d/l) A_{delta,tau}(d) over d.

    Sum over mu = +-1 of
      r_delta(l1) Gamma_delta(mu tau) (8X/(l1 pi))^{mu tau} Psi-check(mu tau)
          Z(1 + 2 mu tau; delta) eta_delta(1 + 2 mu tau; l)
    + the same with tau and delta exchanged, times 2 / (3 zeta(2) sqrt(l1)).
    Each of the four terms is singular when tau or delta is 0 or tau = +-delta;
    such shifts are rejected rather than regularised.
    """
    l = int(l)
    if l < 1 or l % 2 == 0:
        raise DomainError("l must be a positive odd integer")
    for _, w, _, _ in (t := _Prop23(shifts, X, Psi, q, eta_tol)).terms:
        if abs(complex(w).real) > 0.25:
            raise DomainError("eta needs |Re w| <= 1/4")
    return t(l)


class _TwistedWeight:
    """Psi(t) = Phi(t) t^-tau, with Phi's breakpoints."""

    def __init__(self, Phi: SmoothWeight, tau: float):
        self.Phi, self.tau = Phi, tau
        self.breakpoints = Phi.breakpoints

    def __call__(self, t):
        return self.Phi(t) * np.asarray(t, dtype=float) ** (-self.tau)


def moment_main_term_finite(shifts, X: float, table, Phi: SmoothWeight,
                            q: QuadratureSpec = QuadratureSpec(), nudge: float = 1e-4) -> complex:
    """The mollified moment from the twisted first-moment main term, summed over h, k <= M.

    W = sum_{h,k} lambda(h) lambda(k) h^{-1/2-delta1} k^{-1/2-delta2} T(hk)
        / ((8X/pi)^tau Gamma_delta(tau) S(1; Phi)),
    with T(l) the main term of the average of (-8d/l) A_{delta,tau}(d)
    against Phi(t) t^-tau. Unlike the closed form this keeps M finite. For
    real delta1 the shift delta = 0 is singular term by term; it is moved to
    i * nudge, which changes the (even, analytic) sum by O(nudge^2).
    """
    from .lfun import ShiftPair
    from .mollify import s_weighted

    d1, d2 = complex(shifts.delta1), complex(shifts.delta2)
    if abs((d1 - d2) / 2) < nudge:
        sh = ShiftPair(d1 + 1j * nudge, d2 - 1j * nudge)
    else:
        sh = ShiftPair(d1, d2)
    tau, delta = complex(sh.tau), complex(sh.delta)
    T = _Prop23(sh, X, _TwistedWeight(Phi, tau.real if abs(tau.imag) < 1e-15 else tau), q, 1e-12)
    sup = table.support
    lam = table.values[sup]
    a = lam * np.exp(-(0.5 + sh.delta1) * np.log(sup))
    b = lam * np.exp(-(0.5 + sh.delta2) * np.log(sup))
    cache = {}
    total = []
    for i, h in enumerate(sup):
        for j, k in enumerate(sup):
            l = int(h) * int(k)
            if l not in cache:
                cache[l] = T(l)
            total.append(a[i] * b[j] * cache[l])
    tot = complex(math.fsum(t.real for t in total), math.fsum(t.imag for t in total))
    S1 = s_weighted(lambda d: 1.0, Phi, X).real
    norm = (8 * X / math.pi) ** tau * gamma_delta(tau, delta) * S1
    return tot / norm
