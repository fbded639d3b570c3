"""Acceptance criteria, each at its stated tolerance and time budget.

Every test prints one PASS/FAIL line; the lines are collected again in the
pytest terminal summary.
"""
import json
import math
import time
import warnings

import numpy as np
import pytest

from nonvanishing import cli
from nonvanishing.arith import gauss_sum, gauss_sum_direct, is_squarefree, kronecker
from nonvanishing.lfun import ShiftPair, afe_cases, afe_product, w_kernel, w_small_xi_main, xi_value
from nonvanishing.mollify import MollifierShape, b_coefficients, build_lambda, moment_empirical, poisson_dual
from nonvanishing.selberg import selberg_lhs, selberg_rhs, synthetic_suite
from nonvanishing.special import SmoothWeight
from nonvanishing.theory import BoundParams, bound_report, ks_density_integral, moment_main_term


def test_01_ks_integral(verdict):
    t0 = time.perf_counter()
    v = ks_density_integral(math.pi / 0.72)
    dt = time.perf_counter() - t0
    ok = abs(v - 0.1827) <= 5e-4 and dt < 1
    assert verdict("1 KS integral", ok, f"{v:.17g} (target 0.1827 +- 5e-4), {dt:.3f} s")


def test_02_bound_constant(verdict):
    t0 = time.perf_counter()
    r = bound_report(BoundParams.reference())
    dt = time.perf_counter() - t0
    ok = 0.77 <= r.c <= 0.81 and 1 - r.c >= 0.19 and dt < 30
    assert verdict("2 bound constant", ok, f"c = {r.c:.17g}, 1 - c = {1 - r.c:.6f}, {dt:.2f} s")


def test_03_afe_identity(verdict):
    t0 = time.perf_counter()
    worst = 0.0
    cases = afe_cases(20, d_max=200)
    for d, sh in cases:
        a = afe_product(d, sh).value
        x = xi_value(0.5 + sh.delta1, d) * xi_value(0.5 + sh.delta2, d)
        worst = max(worst, abs(a - x) / (1 + abs(x)))
    dt = time.perf_counter() - t0
    ok = len(cases) == 20 and worst <= 1e-8 and dt < 120
    assert verdict("3 AFE identity", ok, f"{len(cases)} cases, worst |A - xi xi|/(1+|xi xi|) = {worst:.3g}, {dt:.1f} s")


def test_04_selberg_identity(verdict):
    t0 = time.perf_counter()
    suite = synthetic_suite()
    worst = 0.0
    for case in suite:
        lhs = selberg_lhs(case.zeros, case.box)
        rhs = selberg_rhs(case.f, case.box).total
        worst = max(worst, abs(rhs - lhs) / (1 + abs(lhs)))
    dt = time.perf_counter() - t0
    ok = len(suite) >= 5 and worst <= 1e-6 and dt < 60
    assert verdict("4 Selberg identity", ok, f"{len(suite)} functions, worst {worst:.3g}, {dt:.2f} s")


def test_05_gauss_sums(verdict):
    t0 = time.perf_counter()
    worst = worst_sf = 0.0
    for n in range(1, 100, 2):
        for k in range(-20, 21):
            g = gauss_sum(k, n)
            worst = max(worst, abs(g - gauss_sum_direct(k, n)))
            if is_squarefree(n):
                worst_sf = max(worst_sf, abs(g - kronecker(k, n) * math.sqrt(n)))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-10 and worst_sf <= 1e-10 and dt < 10
    assert verdict("5 Gauss sums", ok, f"vs direct {worst:.3g}, vs (k/n) sqrt(n) {worst_sf:.3g}, {dt:.2f} s")


def test_06_kernel_asymptotics(verdict):
    dl, tau = 0.05, 0.1
    xs = np.array([1e-3, 1e-4])
    res = np.abs(w_kernel(xs, dl, tau) - w_small_xi_main(xs, dl, tau))
    exponent = math.log(res[0] / res[1]) / math.log(10)
    small_ok = 0.9 / 2 <= exponent <= 0.9 * 2
    big = [abs(w_kernel(x, dl, tau)) / math.exp(-x) for x in (20.0, 40.0)]
    big_ok = all(b <= 1 for b in big)
    shift = max(abs(w_kernel(x, dl, tau, c=0.5) - w_kernel(x, dl, tau, c=1.0)) for x in (1e-3, 0.1, 1.0, 5.0))
    shift_ok = shift <= 1e-12
    ok = small_ok and big_ok and shift_ok
    assert verdict("6 kernel asymptotics", ok,
                   f"small-xi exponent {exponent:.3f} (0.9 within x2), |W| e^xi = {big[0]:.3g}, {big[1]:.3g}, "
                   f"contour shift {shift:.3g}")


def test_07_mollifier_structure(verdict):
    M, b = 1e4, 0.64
    t = build_lambda(MollifierShape.cubic(M, b))
    top = int(math.floor(M ** (1 - b) * (1 + 1e-12)))
    coef = b_coefficients(t, 100 * 100)
    low = float(np.max(np.abs(coef[2 : top + 1])))
    sq = max(abs(coef[m * m] - coef[m]) for m in range(1, 101) if is_squarefree(m))
    ok = low == 0.0 and sq <= 1e-12
    assert verdict("7 mollifier structure", ok,
                   f"max |b(n)| for 2 <= n <= {top}: {low:.3g}; max |b(m^2) - b(m)|: {sq:.3g}")


@pytest.mark.slow
def test_08_empirical_chowla(verdict, capsys):
    t0 = time.perf_counter()
    code = cli.main(["verify-chowla", "--max", "10000", "--emit-json"])
    out = capsys.readouterr().out
    dt = time.perf_counter() - t0
    res = json.loads(out)["result"]
    ok = code == 0 and res["proportion"] == 1.0 and dt < 1800
    assert verdict("8 empirical Chowla", ok,
                   f"{res['positive']}/{res['count']} positive, proportion {res['proportion']}, {dt:.0f} s")


def _bump(x):
    if x <= 1 or x >= 2:
        return 0.0
    return math.exp(-1 / ((x - 1) * (2 - x)))


def test_09_poisson(verdict):
    t0 = time.perf_counter()
    worst, parts = 0.0, []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for n in (3, 5, 15):
            r = poisson_dual(n, 500, 5, _bump)
            worst = max(worst, abs(r.lhs - r.rhs))
            parts.append(f"n={n}: {r.lhs:.6g} vs {r.rhs:.6g}")
    dt = time.perf_counter() - t0
    ok = worst <= 1e-4 and dt < 60
    assert verdict("9 Poisson summation", ok, f"{'; '.join(parts)}; worst {worst:.3g}, {dt:.1f} s")


@pytest.mark.slow
@pytest.mark.parametrize("d1", [0.1, 0.05 + 0.1j], ids=["0.1", "0.05+0.1i"])
def test_10_moment_consistency(verdict, d1):
    X = 1e4
    M = X**0.4
    shape = MollifierShape.cubic(M, 0.64)
    sh = ShiftPair.conjugate(d1)
    main = moment_main_term(sh, X, M, shape)
    emp = moment_empirical(sh, SmoothWeight(0.05), X, build_lambda(shape))
    rel = emp.value / main - 1
    ok = abs(rel) <= 0.25 and emp.failures == 0
    assert verdict(f"10 moment consistency delta1={d1}", ok,
                   f"empirical {emp.value:.7g} over {emp.count} d, main term {main:.7g}, relative {rel:+.3f}")
