import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import dyadic_bits, reduced_fractions
from wilton_lab.errors import CFTerminated, DomainError
from wilton_lab.gauss_cf import (XP, cf_expand, convergent_denominators, gauss_map, orbit_terms,
                                 to_mpfr)
from wilton_lab.realspec import CFCoeffs, Dyadic, Rational

GOLDEN = CFCoeffs((), (1,))
SILVER = CFCoeffs((), (2,))


def fib(n):
    a, b = 1, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def test_gauss_map_exact_rational():
    assert gauss_map(Fraction(7, 10)) == Fraction(3, 7)
    assert gauss_map(Fraction(1, 4)) == 0


def test_gauss_map_fixed_points_extended_precision():
    g = XP.div(XP.sub(XP.sqrt(5), 1), 2)
    s = XP.sub(XP.sqrt(2), 1)
    assert abs(gauss_map(g) - g) < 1e-30
    assert abs(gauss_map(s) - s) < 1e-30


@pytest.mark.parametrize("x", [0, 1, Fraction(3, 2), -0.5, 1.0])
def test_gauss_map_domain(x):
    with pytest.raises(DomainError):
        gauss_map(x)


def test_cf_expand_13_29():
    orb = cf_expand(Rational(13, 29))
    assert orb.a == [2, 4, 3]
    assert orb.convergents == [Fraction(1, 2), Fraction(4, 9), Fraction(13, 29)]
    assert orb.truncated_at.reason == "terminated"


def test_cf_expand_golden_fibonacci():
    orb = cf_expand(GOLDEN, max_terms=20)
    assert orb.a == [1] * 20
    assert orb.q == [fib(k) for k in range(21)]
    assert orb.truncated_at.reason == "max_terms"


def test_cf_expand_half_terminates():
    orb = cf_expand(Dyadic(1, 1))
    assert orb.a == [2]
    assert orb.truncated_at.reason == "terminated"


def test_cf_expand_q_limit():
    orb = cf_expand(GOLDEN, max_terms=100, q_limit=1000)
    assert orb.q[-1] <= 1000 < orb.q[-1] + orb.q[-2]
    assert orb.truncated_at.reason == "q_limit"


def test_dyadic_stops_at_grid_depth():
    x = Dyadic(0x9E3779B97F4A7C15, 64)
    orb = cf_expand(x, max_terms=200)
    assert orb.q[-2] ** 2 <= 2**64 < orb.q[-1] ** 2
    assert orb.truncated_at.reason in ("q_limit", "terminated")


def test_orbit_golden():
    g = (math.sqrt(5) - 1) / 2
    orb = orbit_terms(GOLDEN, 30)
    for k in range(31):
        assert float(orb.beta[k]) == pytest.approx(g ** (k + 1), rel=1e-12)
        assert float(orb.gamma[k]) == pytest.approx(g ** k * math.log(1 / g), rel=1e-12)


def test_orbit_13_29():
    orb = orbit_terms(Rational(13, 29), 2)
    assert float(orb.gamma[0]) == pytest.approx(math.log(29 / 13), rel=1e-15)
    assert abs(float(orb.gamma[0]) - 0.80235) < 1e-5
    with pytest.raises(CFTerminated):
        orbit_terms(Rational(13, 29), 3)
    part = orbit_terms(Rational(13, 29), 5, allow_terminated=True)
    assert len(part.gamma) == 3


@given(reduced_fractions(10**9))
def test_rational_reconstruction_exact(t):
    x = Rational(*t)
    orb = cf_expand(x, max_terms=10**4)
    assert orb.convergents[-1] == x.to_fraction()


@given(reduced_fractions(10**12))
def test_convergent_recursion(t):
    orb = cf_expand(Rational(*t), max_terms=10**4)
    assert orb.q == convergent_denominators(orb.a)
    for k in range(1, len(orb.a)):
        a = orb.a[k]
        assert orb.p[k + 1] == a * orb.p[k] + orb.p[k - 1]
        assert orb.q[k + 1] == a * orb.q[k] + orb.q[k - 1]
    for k in range(len(orb.a)):
        assert orb.q[k + 1] >= fib(k)
    assert all(b > a for a, b in zip(orb.q[1:], orb.q[2:]))


@given(dyadic_bits)
def test_convergent_error_bound(bits):
    x = Fraction(bits, 2**64)
    orb = cf_expand(Rational(x.numerator, x.denominator), max_terms=10**4)
    for k in range(1, len(orb.q) - 1):
        assert abs(x - Fraction(orb.p[k], orb.q[k])) <= Fraction(1, orb.q[k] * orb.q[k + 1])


@given(dyadic_bits)
def test_alpha_pairs_at_most_half(bits):
    orb = orbit_terms(Dyadic(bits, 64), 200, allow_terminated=True)
    al = orb.alpha
    assert all(0 < a < 1 for a in al)
    assert all(a * b <= Fraction(1, 2) for a, b in zip(al, al[1:]))
    assert all(float(g) > 0 for g in orb.gamma)
    beta = [Fraction(1)] + list(orb.beta)  # beta_{-1}, beta_0, ...
    assert all(beta[k + 2] <= beta[k] / 2 for k in range(len(beta) - 2))


@given(st.lists(st.integers(1, 50), min_size=1, max_size=5),
       st.lists(st.integers(1, 50), min_size=1, max_size=3))
def test_tail_alpha_matches_iterated_map(prefix, period):
    x = CFCoeffs(tuple(prefix), tuple(period))
    orb = orbit_terms(x, 8)
    y = to_mpfr(x)
    for k in range(9):
        assert abs(orb.alpha[k] - y) < 1e-20 * 10 ** k
        y = gauss_map(y)
