import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nonvanishing.errors import ConvergenceError, DomainError
from nonvanishing.special import (QuadratureSpec, SmoothWeight, big_z, eta, fourier_tilde, gamma,
                                  gamma_delta, gl_integrate, hurwitz_zeta, loggamma, mellin_weight,
                                  phi_norm, zeta)

# frozen with mpmath at 40 digits
GAMMA_34_SQ = 1.501646094680629715692842255809350951683
GAMMA_DELTA_03_01 = 1.147475040727596156022930650506716879521
BIG_Z_3_QUARTER = 1.816907957709244982267250443134077743988


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def test_gamma_delta_oracles():
    assert rel(gamma_delta(0, 0), GAMMA_34_SQ) < 1e-14
    assert rel(gamma_delta(0.3, 0.1), GAMMA_DELTA_03_01) < 1e-14


def test_gamma_known_values():
    assert rel(gamma(0.5), math.sqrt(math.pi)) < 1e-15
    assert rel(gamma(5), 24) < 1e-15
    assert rel(gamma(-0.5), -2 * math.sqrt(math.pi)) < 1e-14
    # |Gamma(1/2 + it)|^2 = pi / cosh(pi t)
    t = 7.3
    assert rel(abs(gamma(0.5 + 1j * t)) ** 2, math.pi / math.cosh(math.pi * t)) < 1e-12


@given(st.complex_numbers(max_magnitude=30).filter(lambda z: z.real > -20 and abs(z - round(z.real)) > 1e-3))
def test_gamma_recurrence(z):
    a, b = gamma(z + 1), z * gamma(z)
    assert abs(a - b) <= 1e-12 * (abs(a) + 1e-300)


@given(st.floats(0.05, 0.95), st.floats(-40, 40))
def test_gamma_reflection(x, t):
    z = complex(x, t)
    lhs = loggamma(z) + loggamma(1 - z)
    rhs = cmath.log(math.pi / cmath.sin(math.pi * z))
    d = (lhs - rhs) / (2j * math.pi)
    assert abs(d.real - round(d.real)) < 1e-10 and abs(d.imag) < 1e-10


def test_gamma_delta_symmetric_in_delta():
    for s, dl in [(0.2 + 1j, 0.1 - 0.3j), (-0.4, 0.2j), (1.3 - 2j, 0.05)]:
        assert rel(gamma_delta(s, dl), gamma_delta(s, -dl)) < 1e-14


def test_zeta_values():
    assert rel(zeta(2), math.pi**2 / 6) < 1e-15
    assert rel(zeta(4), math.pi**4 / 90) < 1e-15
    assert rel(zeta(0), -0.5) < 1e-14
    assert rel(zeta(-1), -1 / 12) < 1e-13
    assert rel(zeta(0.5), -1.4603545088095868) < 1e-14
    # first nontrivial zero
    assert abs(zeta(0.5 + 14.134725141734693j)) < 1e-12
    assert rel(big_z(3, 0.25), BIG_Z_3_QUARTER) < 1e-14
    with pytest.raises(DomainError):
        zeta(1)
    with pytest.raises(DomainError):
        big_z(2, 0.5)


@given(st.floats(1.1, 6), st.floats(0.05, 1.0))
def test_hurwitz_shift(s, a):
    # zeta(s, a) = a^-s + zeta(s, a + 1); use zeta(s, 1) = zeta(s) at a = 1
    if a < 1:
        two = hurwitz_zeta(s, a / 2) + hurwitz_zeta(s, (a + 1) / 2)
        assert rel(two, 2**s * hurwitz_zeta(s, a)) < 1e-12
    assert rel(hurwitz_zeta(s, 1.0), zeta(s)) < 1e-14


def test_smooth_weight_shape():
    Phi = SmoothWeight(0.05)
    t = np.array([0.9, 1.0, 1.05, 1.5, 1.95, 2.0, 2.1])
    v = Phi(t)
    assert v[0] == 0 and v[-1] == 0 and v[1] == 0 and v[5] == 0
    assert np.allclose(v[2:5], 1.0, atol=1e-12)
    with pytest.raises(DomainError):
        SmoothWeight(0.7)


@pytest.mark.parametrize("j", [1, 2, 3])
def test_smooth_weight_derivatives(j):
    Phi = SmoothWeight(0.1)
    t = np.linspace(1.01, 1.19, 7)
    h = 1e-5
    num = (Phi.derivative(t + h, j - 1) - Phi.derivative(t - h, j - 1)) / (2 * h)
    assert np.allclose(num, Phi.derivative(t, j), rtol=1e-5, atol=1e-4)


def test_mellin_matches_scipy():
    from scipy import integrate

    Phi = SmoothWeight(0.05)
    for w in (0.0, 0.3 - 2j, -0.6 + 15j):
        re = integrate.quad(lambda y: float(Phi(y)) * (y**w).real, 1, 2, points=list(Phi.breakpoints), limit=400)[0]
        im = integrate.quad(lambda y: float(Phi(y)) * (y**w).imag, 1, 2, points=list(Phi.breakpoints), limit=400)[0]
        assert abs(mellin_weight(w, Phi) - complex(re, im)) < 1e-10


@pytest.mark.parametrize("nu", [1, 2, 3])
def test_mellin_integration_by_parts(nu):
    """Phi-check(w) = (-1)^nu / ((w+1)...(w+nu)) int Phi^(nu)(y) y^(w+nu) dy."""
    Phi = SmoothWeight(0.1)
    w = 0.2 + 9j
    poch = 1
    for j in range(1, nu + 1):
        poch *= w + j
    edges = np.unique(np.concatenate([Phi.breakpoints, np.linspace(1, 2, 12)]))
    inner = gl_integrate(lambda y: Phi.derivative(y, nu) * np.exp((w + nu) * np.log(y)), edges)
    ibp = (-1) ** nu * inner / poch
    # the inner integrand is of size |Phi^(nu)|, so the achievable accuracy scales with it
    bound = 2 ** (w.real + nu) * phi_norm(Phi, nu) / abs(poch)
    assert abs(ibp - mellin_weight(w, Phi)) < 1e-10 * (1 + phi_norm(Phi, nu))
    assert abs(mellin_weight(w, Phi)) <= bound + 1e-14


def test_fourier_tilde_of_indicator():
    one = lambda x: 1.0
    xi = 0.37
    om = 2 * math.pi * xi
    want = (math.sin(2 * om) - math.sin(om)) / om - (math.cos(2 * om) - math.cos(om)) / om
    assert abs(fourier_tilde(one, xi) - want) < 1e-13
    assert abs(fourier_tilde(one, 0.0) - 1) < 1e-14


def test_eta_at_l1_against_truncated_product():
    # the Euler product truncated at a modest cutoff agrees to its tail size
    w, s = 0.1, 1.4
    val = eta(w, s, 1)
    assert np.isfinite(val.real) and abs(val.imag) < 1e-12


def test_eta_l_factor_ratio():
    """eta(w, s; l) / eta(w, s; 1) only involves the primes dividing l."""
    w, s = 0.05 + 0.2j, 1.3 + 0.5j
    e1 = eta(w, s, 1)
    # 3 || l against 9 | l: only the square-free part changes
    ratio = eta(w, s, 9) / eta(w, s, 3)
    assert abs(ratio - (1 - 3 ** (-2 * s)) / (1 - 3 ** (-s))) < 1e-12
    # coprime l multiply
    r15 = eta(w, s, 15) / e1
    assert abs(r15 - (eta(w, s, 3) / e1) * (eta(w, s, 5) / e1)) < 1e-12
    # the prime part of l, not its exponent beyond 2, matters
    assert abs(eta(w, s, 27) - eta(w, s, 3)) < 1e-14 * abs(e1)


def test_eta_domain_and_convergence():
    with pytest.raises(DomainError):
        eta(0.3, 1.2, 1)
    with pytest.raises(DomainError):
        eta(0.1, 0.5, 1)
    with pytest.raises(DomainError):
        eta(0.1, 1.2, 4)
    # near the edge of convergence the tolerance cannot be met within p_max
    with pytest.raises(ConvergenceError):
        eta(0.25, 0.51, 1, tol=1e-12, p_max=10**4)


def test_quadrature_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(abs_tol=0)


@pytest.mark.parametrize("T", [5.0, 10.0, 20.0])
def test_mellin_decay_on_imaginary_axis(T):
    Phi = SmoothWeight(0.05)
    assert abs(mellin_weight(1j * T, Phi)) <= 2 * phi_norm(Phi, 2) / abs(1j * T + 1) ** 2


def test_mellin_at_zero_is_mass():
    Phi = SmoothWeight(0.05)
    mass = gl_integrate(lambda t: Phi(t), Phi.breakpoints)
    assert abs(mellin_weight(0, Phi) - mass) < 1e-13
    assert abs(mass - 0.95) < 1e-3
