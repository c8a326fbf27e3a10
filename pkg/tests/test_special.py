import math
import threading
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracle_values as ov
from conftest import reduced_fractions
from wilton_lab import special
from wilton_lab.errors import DomainError


def test_bernoulli_examples():
    assert special.bernoulli_b2(Fraction(3)) == Fraction(1, 6)
    assert special.bernoulli_b2(Fraction(9, 4)) == Fraction(1, 16) - Fraction(1, 4) + Fraction(1, 6)
    assert special.bernoulli_b2(2.25) == pytest.approx(-0.0208333333333, abs=1e-12)
    assert special.bernoulli_b1(0.5) == 0.0
    assert special.bernoulli_b1(Fraction(1, 2)) == 0


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_bernoulli_bounds_and_period(t):
    b2 = special.bernoulli_b2(t)
    assert -1 / 12 - 1e-12 <= b2 <= 1 / 6 + 1e-12
    assert -0.5 <= special.bernoulli_b1(t) < 0.5


@pytest.mark.parametrize("pq", sorted(ov.PHI2))
def test_phi2_hurwitz_oracle(pq):
    r = special.phi2(Fraction(*pq))
    assert abs(r.value - ov.PHI2[pq]) <= max(r.abs_error_bound, 1e-15) + 1e-16


@pytest.mark.parametrize("lam", [0, 1, Fraction(0), Fraction(1), 5])
def test_phi2_at_integers(lam):
    assert special.phi2(lam).value == pytest.approx(math.pi ** 2 / 36, abs=1e-15)


@given(st.floats(0, 1, allow_nan=False))
def test_phi2_bounded_and_within_tol(lam):
    r = special.phi2(lam, 1e-8)
    assert r.abs_error_bound <= 1e-8
    assert abs(r.value) <= math.pi ** 2 / 36 + r.abs_error_bound


@given(reduced_fractions(60))
def test_phi2_float_route_matches_exact_route(t):
    exact = special.phi2(Fraction(*t))
    approx = special.phi2(t[0] / t[1], 1e-9)
    assert abs(exact.value - approx.value) <= exact.abs_error_bound + approx.abs_error_bound + 1e-12


def test_a_one():
    r = special.a_one()
    assert abs(r.value - ov.A_ONE) <= 1e-12
    assert r.abs_error_bound <= 1e-10
    assert 1 + 0.5 - 2 * math.log(2) == pytest.approx(special.a_one_summand(1))
    assert special.a_one_summand(1) == pytest.approx(0.1137056, abs=1e-7)


def test_a_one_summands_positive():
    s = [special.a_one_summand(n) for n in range(1, 200)]
    assert all(v > 0 for v in s)
    assert all(b < a for a, b in zip(s, s[1:]))


def test_a_one_concurrent_init_is_idempotent():
    out = []
    ts = [threading.Thread(target=lambda: out.append(special.a_one())) for _ in range(8)]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    assert len({r.value for r in out}) == 1


def test_a_lambda_examples():
    one = special.a_lambda(1)
    assert abs(one.value - special.a_one().value) <= one.abs_error_bound + special.a_one().abs_error_bound
    half = special.a_lambda(Fraction(1, 2))
    assert abs(half.value - ov.A_HALF) <= half.abs_error_bound + 1e-15
    oracle = special.direct_a_oracle(Fraction(1, 2))
    assert abs(half.value - oracle.value) <= 1e-8
    assert abs(oracle.value - ov.A_HALF) <= oracle.abs_error_bound


@pytest.mark.parametrize("lam", [0, -0.5, 1.5, Fraction(3, 2)])
def test_a_lambda_domain(lam):
    with pytest.raises(DomainError):
        special.a_lambda(lam)
    with pytest.raises(DomainError):
        special.f_func(lam)


def test_direct_oracle_at_one():
    r = special.direct_a_oracle(1)
    assert abs(r.value - ov.A_ONE) <= r.abs_error_bound


@given(st.floats(2 ** -12, 1.0))
def test_a_lambda_positive(lam):
    assert special.a_lambda(lam, 1e-10).value > 0


def test_a_lambda_second_order_remainder():
    a1 = special.a_one().value

    def rem(lam):
        return (special.a_lambda(lam, 1e-13).value - lam / 2 * math.log(1 / lam)
                - (1 + a1) / 2 * lam) / lam ** 2

    fit = max(abs(rem(2.0 ** -j)) for j in range(4, 8))
    assert max(abs(rem(2.0 ** -j)) for j in range(8, 13)) <= 2 * fit


def test_f_func_examples():
    assert abs(special.f_func(1).value) <= 1e-12
    assert special.f_func(1e-6).value == pytest.approx(ov.A_ONE / 2, abs=1e-4)
    r = special.f_func(Fraction(1, 2))
    assert abs(r.value - ov.F_HALF) <= r.abs_error_bound + 1e-15


def test_f_bounded_by_f_max():
    xs = np.linspace(1e-9, 1, 10**5)
    peak = max(abs(special.f_func(float(x), 1e-7).value) for x in xs)
    assert peak <= special.F_MAX
    assert peak == pytest.approx(ov.A_ONE / 2, abs=1e-6)
