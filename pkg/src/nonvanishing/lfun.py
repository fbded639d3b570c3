"""L(s, chi_{-8d}), its completion xi, and the smoothed kernel W.

Two independent routes to L are provided: the Hurwitz/Euler-Maclaurin
decomposition (any complex s) and, on the real line, the theta-function
expansion of the completed function in terms of incomplete gamma values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy import optimize
from scipy.special import gamma as _sgamma
from scipy.special import gammaincc
from scipy.special import loggamma as _sloggamma

from . import kernels
from .arith import Discriminant, r_shift_table
from .errors import BudgetExceeded, ConvergenceError, DomainError
from .special import QuadratureSpec, em_coefficients, em_plan, gamma

# direct-sum budget for the Hurwitz path (number of character terms)
MAX_TERMS = 400_000_000


def _disc(d) -> Discriminant:
    return d if isinstance(d, Discriminant) else Discriminant(int(d))


@dataclass(frozen=True)
class ShiftPair:
    delta1: complex
    delta2: complex

    def __post_init__(self):
        object.__setattr__(self, "delta1", complex(self.delta1))
        object.__setattr__(self, "delta2", complex(self.delta2))
        if self.kappa > 0.25 + 1e-15:
            raise DomainError(f"kappa = {self.kappa:.6g} exceeds 1/4")

    @classmethod
    def conjugate(cls, delta1: complex) -> "ShiftPair":
        delta1 = complex(delta1)
        return cls(delta1, delta1.conjugate())

    @property
    def tau(self) -> complex:
        return (self.delta1 + self.delta2) / 2

    @property
    def delta(self) -> complex:
        return (self.delta1 - self.delta2) / 2

    @property
    def kappa(self) -> float:
        return max(abs(self.delta.real), abs(self.tau.real))

    def swapped(self) -> "ShiftPair":
        return ShiftPair(self.delta2, self.delta1)


@dataclass(frozen=True)
class ZeroList:
    d: Discriminant
    ordinates: np.ndarray
    resolution: float
    t_max: float

    def __post_init__(self):
        self.ordinates.setflags(write=False)

    def __len__(self):
        return len(self.ordinates)


# ----------------------------------------------------------------- L and xi


def l_value(s: complex, d, tol: float = 1e-12) -> complex:
    """L(s, chi_{-8d}) via the Hurwitz decomposition of the Dirichlet series."""
    disc = _disc(d)
    q = disc.conductor
    s = complex(s)
    sigma = s.real
    N, m = em_plan(s, tol, scale=float(q) ** (1.0 - sigma), n_min=2)
    if N * q > MAX_TERMS:
        raise BudgetExceeded(f"L evaluation would need {N * q} terms")
    coeffs = em_coefficients(s, m)
    return kernels.hurwitz_character_sum(disc.table, s, N, coeffs)


def xi_value(s: complex, d, tol: float = 1e-12) -> complex:
    """(8d/pi)^(s/2 - 1/4) Gamma(s/2 + 1/2) L(s, chi_{-8d})."""
    disc = _disc(d)
    q = disc.conductor
    s = complex(s)
    return (q / math.pi) ** (s / 2 - 0.25) * gamma(s / 2 + 0.5) * l_value(s, disc, tol)


def _theta_terms(q: int, tail: float = 45.0) -> np.ndarray:
    return np.arange(1, int(math.sqrt(tail * q / math.pi)) + 2)


def lambda_real(sigma, d) -> np.ndarray:
    """Completed (q/pi)^((s+1)/2) Gamma((s+1)/2) L(s) on real s, by theta series.

    Uses sum chi(n) n [x^(-a1) Gamma(a1, x) + x^(-a2) Gamma(a2, x)] with
    x = pi n^2 / q, a1 = (s+1)/2, a2 = (2-s)/2.
    """
    disc = _disc(d)
    q = disc.conductor
    sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
    if np.any(sigma <= -1) or np.any(sigma >= 2):
        raise DomainError("theta path is set up for -1 < sigma < 2")
    n = _theta_terms(q)
    chi = disc.table[n % q].astype(float)
    keep = chi != 0
    n, chi = n[keep].astype(float), chi[keep]
    x = (math.pi * n * n / q)[:, None]
    out = 0.0
    for a in ((sigma + 1) / 2, (2 - sigma) / 2):
        a = a[None, :]
        g = gammaincc(a, x) * _sgamma(a) * np.exp(-a * np.log(x))
        out = out + (chi * n) @ g
    return out


def l_real(sigma, d) -> np.ndarray:
    """L(sigma, chi_{-8d}) for real sigma by the theta series."""
    disc = _disc(d)
    q = disc.conductor
    sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
    fac = (q / math.pi) ** ((sigma + 1) / 2) * _sgamma((sigma + 1) / 2)
    return lambda_real(sigma, disc) / fac


def xi_real(sigma, d) -> np.ndarray:
    disc = _disc(d)
    return (disc.conductor / math.pi) ** -0.75 * lambda_real(sigma, disc)


# ------------------------------------------------------------------ kernel W


def _log_gamma_delta(s: np.ndarray, delta: complex) -> np.ndarray:
    a = 0.75 + s / 2
    return _sloggamma(a + delta / 2) + _sloggamma(a - delta / 2)


def _abscissa(xi: float, tau: complex) -> float:
    # near the saddle of |Gamma_delta(s) xi^-s|, which sits at s ~ 2 xi
    return max(abs(tau.real) + 0.5, math.floor(2 * xi - 0.5) + 0.5)


def _contour(c: float, delta: complex, tau: complex, T: float | None):
    gap = c - abs(tau.real)
    if gap <= 0:
        raise DomainError("contour abscissa must exceed |Re tau|")
    h = 2 * math.pi * min(gap, 2.0) / 45
    if T is None:
        # go out until |Gamma_delta| has dropped by e^-45 past its value at t = 0
        ref = float(np.real(_log_gamma_delta(np.array([c + 0j]), delta))[0])
        T = 10.0
        while True:
            edge = np.real(_log_gamma_delta(np.array([c + 1j * T, c - 1j * T]), delta))
            if np.max(edge) - ref < -45 - 2 * math.log(T):
                break
            T *= 1.25
    t = np.arange(-T, T + h / 2, h)
    s = c + 1j * t
    g = np.exp(_log_gamma_delta(s, delta)) * 2 * s / (s * s - tau * tau) * (h / (2 * math.pi))
    return s, g, T


def w_kernel(xi, delta: complex, tau: complex, q: QuadratureSpec = QuadratureSpec(),
             c: float | None = None, chunk: int = 4096):
    """W_{delta,tau}(xi) = (1/2 pi i) int_(c) Gamma_delta(s) xi^-s 2s/(s^2 - tau^2) ds.

    Trapezoid rule on the vertical line; the integrand is analytic in a strip of
    half-width min(c - |Re tau|, ...) about the line, so the error falls like
    exp(-2 pi width / h). With ``c=None`` the abscissa follows the saddle
    point for each xi; a fixed ``c`` reproduces the literal definition.
    """
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    if np.any(xi_arr <= 0):
        raise DomainError("W is defined for xi > 0")
    delta, tau = complex(delta), complex(tau)
    out = np.empty(xi_arr.shape, dtype=complex)
    if c is not None:
        groups = {float(c): np.arange(xi_arr.size)}
    else:
        cs = np.array([_abscissa(x, tau) for x in xi_arr.ravel()])
        groups = {float(v): np.flatnonzero(cs == v) for v in np.unique(cs)}
    flat = out.ravel()
    xs = xi_arr.ravel()
    for cval, idx in groups.items():
        s, g, _ = _contour(cval, delta, tau, q.contour_truncation)
        for lo in range(0, idx.size, chunk):
            sel = idx[lo : lo + chunk]
            lx = np.log(xs[sel])[:, None]
            flat[sel] = np.exp(-lx * s[None, :]) @ g
    out = flat.reshape(xi_arr.shape)
    return complex(out[0]) if np.ndim(xi) == 0 else out


def w_small_xi_main(xi, delta: complex, tau: complex):
    """The two residue terms Gamma_delta(tau) xi^-tau + Gamma_delta(-tau) xi^tau."""
    xi = np.asarray(xi, dtype=float)
    gp = np.exp(_log_gamma_delta(np.array([tau]), delta))[0]
    gm = np.exp(_log_gamma_delta(np.array([-tau]), delta))[0]
    return gp * xi ** (-tau) + gm * xi**tau


# ------------------------------------------------------------------- the AFE


@dataclass(frozen=True)
class AFEResult:
    value: complex
    tail_bound: float
    n_max: int
    certified: bool


def afe_truncation(d: int, abs_tol: float) -> int:
    return int(math.ceil(8 * d / math.pi * (math.log(1 / abs_tol) + 10)))


def afe_product(d, shifts: ShiftPair, q: QuadratureSpec = QuadratureSpec()) -> AFEResult:
    """A_{delta,tau}(d) = sum_n r_delta(n) n^-1/2 chi(n) W(n pi / 8d)."""
    disc = _disc(d)
    dd = disc.d
    N = afe_truncation(dd, q.abs_tol)
    n = np.arange(1, N + 1)
    chi = disc.table[n % disc.conductor].astype(float)
    keep = chi != 0
    n, chi = n[keep], chi[keep]
    r = r_shift_table(N, shifts.delta)[n]
    w = w_kernel(n * math.pi / (8 * dd), shifts.delta, shifts.tau, q)
    terms = r / np.sqrt(n) * chi * w
    value = complex(np.sum(terms))
    # tail: |r_delta(n)|/sqrt(n) <= 2 n^kappa and |W(xi)| <= e^-xi for large xi
    a = math.pi / (8 * dd)
    k = shifts.kappa
    tail = 2 * N**k * math.exp(-a * N) / max(a - k / N, a / 2)
    return AFEResult(value=value, tail_bound=tail, n_max=N, certified=tail <= q.abs_tol)


# ------------------------------------------------------------ real-line checks


@dataclass(frozen=True)
class PositivityResult:
    d: int
    positive: bool
    min_value: float
    min_location: float
    bracket: tuple[float, float] | None = None
    grid_step: float = 1e-3
    method: str = "theta+chebyshev"
    rigorous: bool = False


def _lambda_interpolant(disc: Discriminant, deg: int = 24):
    """Chebyshev interpolant of the completed function on [1/2, 1]."""
    for _ in range(4):
        coef = C.chebinterpolate(lambda u: lambda_real(0.75 + u / 4, disc), deg)
        scale = np.max(np.abs(coef))
        if np.max(np.abs(coef[-3:])) <= 1e-14 * scale:
            return coef
        deg *= 2
    raise ConvergenceError("Chebyshev interpolant of Lambda did not settle")


def positivity_check(d, grid_step: float = 1e-3,
                     q: QuadratureSpec = QuadratureSpec()) -> PositivityResult:
    """Sample L(sigma, chi_{-8d}) on a grid over [0, 1] and report its minimum.

    Heuristic (grid-based); the completed function is interpolated on [1/2, 1]
    and reflected through sigma -> 1 - sigma, then the minimum is polished
    with direct evaluations.
    """
    if grid_step > 0.01:
        raise DomainError("grid_step must be <= 0.01")
    disc = _disc(d)
    qd = disc.conductor
    coef = _lambda_interpolant(disc)
    grid = np.linspace(0.0, 1.0, int(round(1 / grid_step)) + 1)
    u = 4 * (np.maximum(grid, 1 - grid) - 0.75)
    lam = C.chebval(u, coef)
    fac = (qd / math.pi) ** ((grid + 1) / 2) * _sgamma((grid + 1) / 2)
    vals = lam / fac
    i = int(np.argmin(vals))
    loc, vmin = float(grid[i]), float(vals[i])
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    if hi > lo:
        res = optimize.minimize_scalar(
            lambda x: float(l_real(x, disc)[0]), bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-10},
        )
        if res.fun < vmin:
            loc, vmin = float(res.x), float(res.fun)
    bracket = None
    neg = np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
    if neg.size:
        j = int(neg[0])
        bracket = (float(grid[j]), float(grid[j + 1]))
    positive = bool(vmin > 0 and bracket is None)
    return PositivityResult(disc.d, positive, vmin, loc, bracket, grid_step)


def real_sign_changes(d, grid_step: float = 1e-3) -> list[tuple[float, float]]:
    """Grid brackets (lo, hi) in [1/2, 1] where L(sigma, chi_{-8d}) changes sign.

    Zeros off this interval mirror these through sigma -> 1 - sigma.
    """
    if grid_step > 0.01:
        raise DomainError("grid_step must be <= 0.01")
    disc = _disc(d)
    coef = _lambda_interpolant(disc)
    grid = np.linspace(0.5, 1.0, int(round(0.5 / grid_step)) + 1)
    lam = C.chebval(4 * (grid - 0.75), coef)
    idx = np.flatnonzero(np.sign(lam[:-1]) != np.sign(lam[1:]))
    return [(float(grid[j]), float(grid[j + 1])) for j in idx]


def _z_critical(t, disc: Discriminant, tol: float = 1e-12) -> float:
    return xi_value(0.5 + 1j * float(t), disc, tol).real


def scan_zeros(d, t_max: float, resolution: float | None = None,
               panel: float = 1.0, tol: float = 1e-12) -> ZeroList:
    """Ordinates of zeros of xi(1/2 + it) for 0 < t <= t_max via sign changes.

    The real function t -> xi(1/2+it) is Chebyshev-interpolated on panels,
    sampled at ``resolution``, and each sign change is polished by Brent's
    method on direct evaluations. Close pairs that the grid does not
    separate are missed.
    """
    disc = _disc(d)
    logq = math.log(disc.conductor)
    limit = 0.01 / logq
    if resolution is None:
        resolution = limit
    if resolution > limit * (1 + 1e-12):
        raise DomainError(f"resolution must be <= 0.01/log(8d) = {limit:.3g}")
    if t_max <= 0:
        return ZeroList(disc, np.array([]), resolution, t_max)
    f = np.vectorize(lambda t: _z_critical(t, disc, tol))
    edges = np.linspace(0.0, t_max, max(1, int(math.ceil(t_max / panel))) + 1)
    roots = []
    for a, b in zip(edges[:-1], edges[1:]):
        mid, half = (a + b) / 2, (b - a) / 2
        deg = 16
        while True:
            coef = C.chebinterpolate(lambda u: f(mid + half * u), deg)
            if np.max(np.abs(coef[-3:])) <= 1e-13 * np.max(np.abs(coef)) or deg >= 256:
                break
            deg *= 2
        ts = np.arange(a, b + resolution / 2, resolution)
        ts = ts[(ts >= a) & (ts <= b)]
        if ts[-1] < b:
            ts = np.append(ts, b)
        vals = C.chebval((ts - mid) / half, coef)
        for j in np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0):
            lo, hi = float(ts[j]), float(ts[j + 1])
            flo, fhi = _z_critical(lo, disc, tol), _z_critical(hi, disc, tol)
            if flo * fhi >= 0:
                continue  # interpolant sign change not confirmed
            roots.append(optimize.brentq(_z_critical, lo, hi, args=(disc, tol), xtol=1e-12))
    ords = np.array(sorted(r for r in set(roots) if r > 0))
    if ords.size > 1:
        keep = np.concatenate([[True], np.diff(ords) > resolution])
        ords = ords[keep]
    return ZeroList(disc, ords, resolution, t_max)


def low_zero_statistic(d, S: float, logX: float, zeros: ZeroList | None = None) -> float:
    """(1/2) sum over zeros with |gamma logX| <= S of cos(pi gamma logX / 2S).

    Ordinates come in pairs +-gamma, so this is the sum over gamma > 0.
    """
    disc = _disc(d)
    height = S / logX
    if zeros is None:
        zeros = scan_zeros(disc, height)
    elif zeros.t_max < height:
        raise DomainError("zero list does not reach the required height")
    g = zeros.ordinates[zeros.ordinates * logX <= S]
    return float(np.sum(np.cos(math.pi * g * logX / (2 * S))))


def afe_cases(n: int = 20, d_max: int = 200, seed: int = 0) -> list[tuple[int, ShiftPair]]:
    """A reproducible assortment of (d, shifts) with d <= d_max and kappa <= 1/4.

    Half the shift pairs are conjugate (delta2 = conj(delta1)), the rest are
    real or general complex pairs.
    """
    from .arith import sieve_squarefree

    rng = np.random.default_rng(seed)
    ds = sieve_squarefree(d_max).odd_squarefree_array(1, d_max)
    out = []
    for k in range(n):
        d = int(ds[0] if k == 0 else ds[-1] if k == 1 else rng.choice(ds))
        re, im = rng.uniform(-0.25, 0.25), rng.uniform(-3.0, 3.0)
        if k % 2 == 0:
            shifts = ShiftPair.conjugate(complex(re, im))
        elif k % 4 == 1:
            shifts = ShiftPair(re, rng.uniform(-0.25, 0.25))
        else:
            shifts = ShiftPair(complex(re, im), complex(rng.uniform(-0.25, 0.25), rng.uniform(-3, 3)))
        if shifts.kappa > 0.25:
            shifts = ShiftPair(shifts.delta1 / 2, shifts.delta2 / 2)
        out.append((d, shifts))
    return out
