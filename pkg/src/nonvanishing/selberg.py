"""Selberg's weighted zero count for a rectangle, evaluated from its boundary.

For f holomorphic and zero-free on Re s >= W, and the box with corners
W0 +- iH, W1 +- iH (W0 < W < W1),

    4H sum cos(pi gamma / 2H) sinh(pi (beta - W0) / 2H)
        = int cos(pi t/2H) log|f(W0+it)| dt
        + int sinh(pi (a - W0)/2H) log|f(a+iH) f(a-iH)| da
        - Re int cos(pi (W1 - W0 + it)/(2iH)) log f(W1+it) dt,

the sum running over zeros beta + i gamma inside the box.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError
from .special import QuadratureSpec, gl_panels

log = logging.getLogger(__name__)

# |f| below this at a quadrature node counts as a zero on the boundary
BOUNDARY_ZERO = 1e-12


@dataclass(frozen=True)
class SelbergBox:
    W0: float
    W1: float
    H: float

    def __post_init__(self):
        if not self.W0 < self.W1:
            raise DomainError("need W0 < W1")
        if self.H <= 0:
            raise DomainError("need H > 0")

    @classmethod
    def scaled(cls, R: float, S: float, logX: float, W1: float) -> "SelbergBox":
        """W0 = 1/2 - R/logX, H = S/logX."""
        if R <= 0 or S <= 0 or logX <= 0:
            raise DomainError("R, S and logX must be positive")
        return cls(0.5 - R / logX, W1, S / logX)

    def contains(self, z: complex) -> bool:
        return self.W0 <= z.real <= self.W1 and abs(z.imag) <= self.H

    def with_height(self, H: float) -> "SelbergBox":
        return SelbergBox(self.W0, self.W1, H)


@dataclass(frozen=True)
class AnalyticFunction:
    """A holomorphic ``f`` with ``f != 0`` on Re s >= nonvanishing_abscissa.

    ``f`` must accept a complex numpy array.
    """

    f: Callable[[np.ndarray], np.ndarray]
    nonvanishing_abscissa: float
    name: str = "f"

    def __call__(self, s):
        return self.f(s)


@dataclass(frozen=True)
class SelbergTerms:
    left: float
    horizontal: float
    right: float
    box: SelbergBox
    perturbations: int = 0

    @property
    def total(self) -> float:
        return self.left + self.horizontal + self.right


class _BoundaryZero(Exception):
    pass


def _logabs(f, s):
    v = np.atleast_1d(np.asarray(f(np.atleast_1d(np.asarray(s, dtype=complex)))))
    a = np.abs(v)
    if np.any(a < BOUNDARY_ZERO):
        raise _BoundaryZero
    return np.log(a)


def _quad(fun, a, b, spec: QuadratureSpec, points=None):
    val, err = integrate.quad(
        fun, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=500, points=points
    )
    if not np.isfinite(val) or err > max(1e3 * spec.abs_tol, 1e3 * spec.rel_tol * abs(val)):
        raise ConvergenceError("boundary integral did not converge", val, err)
    return val


def _right_edge(f, box: SelbergBox, spec: QuadratureSpec) -> float:
    """-Re int cos(pi (W1-W0+it)/(2iH)) log f(W1+it) dt with a continuous log f."""
    H, A = box.H, box.W1 - box.W0
    ch, sh = math.cosh(math.pi * A / (2 * H)), math.sinh(math.pi * A / (2 * H))
    panels = 8
    prev = None
    for _ in range(spec.max_depth + 4):
        t, w = gl_panels(np.linspace(-H, H, panels + 1))
        v = np.asarray(f(box.W1 + 1j * t), dtype=complex)
        if np.any(np.abs(v) < BOUNDARY_ZERO):
            raise _BoundaryZero
        ang = np.angle(v)
        step = np.angle(v[1:] / v[:-1])
        if np.max(np.abs(step)) >= math.pi / 2:
            panels *= 2
            continue
        # continuous argument from the first node; the branch constant drops out
        arg = ang[0] + np.concatenate([[0.0], np.cumsum(step)])
        c = np.cos(math.pi * t / (2 * H))
        s = np.sin(math.pi * t / (2 * H))
        val = -(ch * np.sum(w * c * np.log(np.abs(v))) - sh * np.sum(w * s * arg))
        if prev is not None and abs(val - prev) <= max(spec.abs_tol, spec.rel_tol * abs(val)):
            return float(val)
        prev = val
        panels *= 2
    raise ConvergenceError("right-edge integral did not settle", prev, None)


def _rhs_once(f, box: SelbergBox, spec: QuadratureSpec) -> SelbergTerms:
    H, W0 = box.H, box.W0
    k = math.pi / (2 * H)
    left = _quad(lambda t: math.cos(k * t) * _logabs(f, W0 + 1j * t)[0], -H, H, spec)
    horiz = _quad(
        lambda a: math.sinh(k * (a - W0))
        * float(np.sum(_logabs(f, np.array([a + 1j * H, a - 1j * H])))),
        box.W0, box.W1, spec,
    )
    right = _right_edge(f, box, spec)
    return SelbergTerms(left, horiz, right, box)


def selberg_rhs(f: AnalyticFunction, box: SelbergBox,
                q: QuadratureSpec = QuadratureSpec(abs_tol=1e-11, rel_tol=1e-11),
                retries: int = 3) -> SelbergTerms:
    """The three boundary integrals; ``.total`` is the weighted zero count."""
    if box.W1 < f.nonvanishing_abscissa:
        raise DomainError("W1 must lie in the zero-free half-plane of f")
    cur = box
    for attempt in range(retries + 1):
        try:
            out = _rhs_once(f, cur, q)
            return SelbergTerms(out.left, out.horizontal, out.right, cur, attempt)
        except _BoundaryZero:
            if attempt == retries:
                break
            cur = cur.with_height(cur.H * (1 + 1e-4))
            log.warning("zero on the boundary of %s; height perturbed to %.12g", box, cur.H)
    raise ConvergenceError("f vanishes on the box boundary after perturbation")


def selberg_lhs(zeros: Iterable[complex], box: SelbergBox) -> float:
    """4H sum cos(pi gamma/2H) sinh(pi (beta - W0)/2H) over zeros in the box."""
    H, W0 = box.H, box.W0
    terms = [
        math.cos(math.pi * z.imag / (2 * H)) * math.sinh(math.pi * (z.real - W0) / (2 * H))
        for z in map(complex, zeros)
        if box.contains(z)
    ]
    return 4 * H * math.fsum(terms)


def real_zero_threshold(R: float, S: float) -> float:
    """8 S sinh(pi R / 2S): the count forced by a real zero in [1/2, 1]."""
    if R < 0 or S <= 0:
        raise DomainError("need R >= 0 and S > 0")
    return 8 * S * math.sinh(math.pi * R / (2 * S))


def default_sigma0(M: float) -> float:
    """1 + 3 log log M / log M, beyond which L M is zero-free."""
    lm = math.log(M)
    return 1 + 3 * math.log(lm) / lm


@dataclass(frozen=True)
class MollifiedCount:
    d: int
    I1: float
    I2: float
    I3: float
    threshold: float
    sigma0: float
    perturbations: int = 0

    @property
    def total(self) -> float:
        return self.I1 + self.I2 + self.I3


def mollified_count(d, shape, R: float, S: float, logX: float, sigma0: float | None = None,
                    q: QuadratureSpec = QuadratureSpec(abs_tol=1e-10, rel_tol=1e-10),
                    table=None) -> MollifiedCount:
    """I1(d) + I2(d) + I3(d) for f = L(s, chi_{-8d}) M(s, d), reported term by term.

    These are the boundary integrals of the box with W0 = 1/2 - R/logX,
    H = S/logX, W1 = sigma0, rescaled by logX.
    """
    from .lfun import _disc, l_value
    from .mollify import build_lambda, m_poly

    disc = _disc(d)
    if table is None:
        table = build_lambda(shape)
    if sigma0 is None:
        sigma0 = default_sigma0(shape.M) if shape.M > math.e else 2.0

    def f(s):
        s = np.atleast_1d(s)
        return np.array([l_value(z, disc) * m_poly(z, disc, table) for z in s])

    box = SelbergBox.scaled(R, S, logX, sigma0)
    terms = selberg_rhs(AnalyticFunction(f, sigma0), box, q)
    return MollifiedCount(
        disc.d, logX * terms.left, logX * terms.horizontal, logX * terms.right,
        real_zero_threshold(R, S), sigma0, terms.perturbations,
    )


# ------------------------------------------------------- synthetic test cases


@dataclass(frozen=True)
class SyntheticCase:
    f: AnalyticFunction
    zeros: tuple
    box: SelbergBox


def _poly_with_zeros(zeros, scale=lambda s: 1.0):
    zs = np.array(zeros, dtype=complex)

    def f(s):
        s = np.asarray(s, dtype=complex)
        out = np.ones_like(s) * scale(s)
        for z in zs:
            out = out * (s - z)
        return out

    return f


def synthetic_suite() -> list[SyntheticCase]:
    """Holomorphic functions with known zeros, each with a box around them."""
    box = SelbergBox(0.3, 2.0, 0.5)
    cases = []

    def add(name, zeros, f=None, box=box):
        right = max((z.real for z in map(complex, zeros)), default=-np.inf) + 1e-9
        fn = f if f is not None else _poly_with_zeros(zeros)
        cases.append(SyntheticCase(AnalyticFunction(fn, right, name), tuple(zeros), box))

    add("simple", [0.7 + 0.2j])
    add("conjugate pair", [0.6 + 0.1j, 0.6 - 0.1j])
    add("double zero", [0.8, 0.8])
    add("gaussian factor", [0.55 + 0.3j, 0.9 - 0.05j],
        _poly_with_zeros([0.55 + 0.3j, 0.9 - 0.05j], lambda s: np.exp(s * s)))
    # 1 - e^{-(s - rho)} vanishes at rho + 2 pi i k; only k = 0 is in the box
    add("periodic", [0.65 + 0.15j],
        lambda s: -np.expm1(-(np.asarray(s, dtype=complex) - (0.65 + 0.15j))))
    add("zero left of box", [0.1 + 0.2j, 0.75])
    add("zero free", [], lambda s: np.exp(np.asarray(s, dtype=complex)) + 0 * s)
    return cases
