import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nonvanishing.arith import (Discriminant, divisors, factorize, gauss_sum, gauss_sum_direct,
                                is_squarefree, kronecker, m_y, mobius, r_shift, r_shift_table,
                                r_y, sieve_squarefree, squarefree_split)
from nonvanishing.errors import DomainError

odd = st.integers(1, 2000).map(lambda n: 2 * n - 1)


def legendre_euler(a, p):
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def test_kronecker_examples():
    assert kronecker(-8, 1) == 1
    assert kronecker(-8, 3) == 1
    assert kronecker(6, 9) == 0
    assert kronecker(5, 0) == 0 and kronecker(1, 0) == 1
    assert kronecker(-1, -1) == -1


@pytest.mark.parametrize("p", [3, 5, 7, 11, 101, 997])
def test_kronecker_matches_euler_criterion(p):
    for a in range(-50, 50):
        assert kronecker(a, p) == legendre_euler(a, p)


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6), odd)
def test_kronecker_multiplicative_in_top(a, b, n):
    assert kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n)


@given(st.integers(-10**4, 10**4), odd, odd)
def test_kronecker_multiplicative_in_bottom(a, m, n):
    assert kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n)


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6).filter(lambda n: n != 0))
def test_kronecker_zero_iff_common_factor(a, n):
    assert (kronecker(a, n) == 0) == (math.gcd(a, n) > 1)


def test_mobius_examples():
    s = sieve_squarefree(100)
    assert s.mobius(1) == 1 and s.mobius(12) == 0 and s.mobius(30) == -1
    assert mobius(1) == 1 and mobius(12) == 0 and mobius(30) == -1


def test_sieve_matches_factorisation():
    s = sieve_squarefree(5000)
    for n in range(1, 5001):
        assert s.mobius(n) == mobius(n), n


def test_segmented_sieve_across_blocks():
    s = sieve_squarefree(20_000, block=1024)
    ref = sieve_squarefree(20_000)
    assert np.array_equal(s.mu, ref.mu)


def test_sieve_table_is_read_only():
    s = sieve_squarefree(10)
    with pytest.raises(ValueError):
        s.mu[3] = 5


@given(st.integers(1, 3000), st.integers(1, 3000))
def test_mobius_multiplicative(m, n):
    if math.gcd(m, n) == 1:
        assert mobius(m * n) == mobius(m) * mobius(n)


def test_squarefree_density():
    N = 200_000
    s = sieve_squarefree(N)
    frac = np.count_nonzero(s.mu[1:]) / N
    assert abs(frac - 6 / math.pi**2) < 2e-3
    odd_frac = len(s.odd_squarefree_array(1, N)) / N
    assert abs(odd_frac - 4 / math.pi**2) < 2e-3


def test_odd_squarefree_enumeration():
    s = sieve_squarefree(200)
    got = list(s.odd_squarefree(100, 200))
    want = [d for d in range(100, 201) if d % 2 and is_squarefree(d)]
    assert got == want


def test_discriminant_checks_and_table():
    with pytest.raises(DomainError):
        Discriminant(4)
    with pytest.raises(DomainError):
        Discriminant(9)
    disc = Discriminant(15)
    assert disc.conductor == 120 and disc.fundamental == -120
    for n in range(300):
        assert disc.chi(n) == kronecker(-120, n)
        assert disc.table[n % 120] == kronecker(-120, n)


def test_m_y_r_y_examples():
    assert (m_y(15, 3), r_y(15, 3)) == (1, 0)
    assert (m_y(4, 1), r_y(4, 1)) == (1, -1)
    assert m_y(36, 10) == 0


@given(st.integers(1, 10**5), st.floats(1, 400))
def test_m_y_plus_r_y_is_mu_squared(d, Y):
    assert m_y(d, Y) + r_y(d, Y) == mobius(d) ** 2


def test_r_shift_examples():
    assert r_shift(1, 0.7 + 1j) == pytest.approx(1)
    assert r_shift(6, 0) == pytest.approx(4)
    assert r_shift(4, 1) == pytest.approx(5.25)


@given(st.integers(1, 5000), st.complex_numbers(max_magnitude=3))
def test_r_shift_even(n, s):
    a, b = r_shift(n, s), r_shift(n, -s)
    assert abs(a - b) <= 1e-12 * (1 + abs(a))


@given(st.integers(1, 300), st.integers(1, 300), st.complex_numbers(max_magnitude=2))
def test_r_shift_multiplicative(m, n, s):
    if math.gcd(m, n) == 1:
        a, b = r_shift(m * n, s), r_shift(m, s) * r_shift(n, s)
        assert abs(a - b) <= 1e-10 * (1 + abs(a))


def test_r_shift_table_matches_scalar():
    s = 0.3 - 1.7j
    t = r_shift_table(500, s)
    assert t[0] == 0
    for n in range(1, 501):
        assert abs(t[n] - r_shift(n, s)) <= 1e-12 * abs(r_shift(n, s))


def test_factorize_and_split():
    n = 2**3 * 3**2 * 101 * 1000003
    assert factorize(n) == {2: 3, 3: 2, 101: 1, 1000003: 1}
    assert squarefree_split(3 * 5**2 * 7**3) == (21, 35)
    assert divisors(12) == [1, 2, 3, 4, 6, 12]


def test_gauss_examples():
    assert gauss_sum_direct(0, 9) == pytest.approx(6)
    assert gauss_sum_direct(1, 3) == pytest.approx(math.sqrt(3))
    assert gauss_sum_direct(3, 9) == pytest.approx(-3)
    assert gauss_sum(5, 1) == 1
    # frozen from the direct-sum oracle
    assert gauss_sum(2, 25) == pytest.approx(0, abs=1e-12)
    assert gauss_sum_direct(2, 25) == pytest.approx(0, abs=1e-10)
    assert gauss_sum(9, 27) == pytest.approx(9 * math.sqrt(3))
    assert gauss_sum_direct(9, 27) == pytest.approx(9 * math.sqrt(3))


@given(st.integers(-200, 200), st.integers(1, 243).map(lambda n: 2 * n - 1))
def test_gauss_sum_matches_direct(k, n):
    assert abs(gauss_sum(k, n) - gauss_sum_direct(k, n)) <= 1e-9


@given(st.integers(-10**6, 10**6), odd.filter(is_squarefree))
def test_gauss_sum_squarefree_closed_form(k, n):
    assert gauss_sum(k, n) == pytest.approx(kronecker(k, n) * math.sqrt(n), abs=1e-9)


@given(st.integers(-100, 100), odd, odd)
def test_gauss_sum_multiplicative(k, m, n):
    if math.gcd(m, n) == 1 and m * n < 10**6:
        assert gauss_sum(k, m * n) == pytest.approx(gauss_sum(k, m) * gauss_sum(k, n), abs=1e-8)


def test_gauss_sum_rejects_even():
    with pytest.raises(DomainError):
        gauss_sum(1, 4)
    with pytest.raises(DomainError):
        gauss_sum_direct(1, 4)
