from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracle_values as ov
from wilton_lab.errors import DomainError
from wilton_lab.measure import (GOLDEN, Interval, gauss_measure, j_set_probe, ks_statistic_gauss,
                                l_norm_p, preimage_branch, preimage_measure, sample_gauss,
                                transfer_norm_ratio)

unit_pairs = st.tuples(st.floats(0, 1), st.floats(0, 1)).filter(lambda t: abs(t[0] - t[1]) > 1e-9)


def iv(t):
    return Interval(min(t), max(t))


def test_gauss_measure_examples():
    assert gauss_measure(Interval(0, 1)) == pytest.approx(1.0, abs=1e-15)
    assert gauss_measure(Interval(0, 0.5)) == pytest.approx(ov.M_HALF, abs=1e-15)


@given(unit_pairs, st.floats(0.01, 0.99))
def test_additivity(t, s):
    a, b = min(t), max(t)
    c = a + s * (b - a)
    if not a < c < b:
        return
    whole = gauss_measure(Interval(a, b))
    assert gauss_measure(Interval(a, c)) + gauss_measure(Interval(c, b)) == pytest.approx(whole, abs=1e-15)


def test_interval_validation():
    for lo, hi in [(0.5, 0.5), (0.6, 0.5), (-0.1, 0.5), (0.5, 1.1)]:
        with pytest.raises(DomainError):
            Interval(lo, hi)


def test_branch_one_of_lower_half():
    assert preimage_branch(Interval(Fraction(0), Fraction(1, 2)), 1) == \
        Interval(Fraction(2, 3), Fraction(1))


def test_preimage_examples():
    r = preimage_measure(Interval(0, 0.5))
    assert abs(r.value - ov.M_HALF) <= 1e-10
    assert preimage_measure(Interval(0, 1)).value == pytest.approx(1.0, abs=1e-12)


@given(unit_pairs)
@settings(max_examples=40)
def test_preimage_invariance(t):
    r = preimage_measure(iv(t))
    assert abs(r.value - gauss_measure(iv(t))) <= max(r.abs_error_bound, 1e-9)


def test_sampling_matches_m():
    x = sample_gauss(10**5, seed=11)
    assert ks_statistic_gauss(x) < 0.01
    assert np.array_equal(x, sample_gauss(10**5, seed=11))


@pytest.mark.parametrize("p", sorted(ov.L_NORM))
def test_l_norm_closed_form(p):
    assert l_norm_p(p) == pytest.approx(ov.L_NORM[p], rel=1e-13)


def test_transfer_ratio_examples():
    r1 = transfer_norm_ratio(1, 2.0, samples=50_000, seed=1)
    assert r1.bound == 1.0 and r1.status == "pass"
    r4 = transfer_norm_ratio(4, 2.0, samples=50_000, seed=1)
    assert r4.bound == pytest.approx(GOLDEN ** 6)
    assert r4.bound == pytest.approx(0.0557, abs=1e-4)
    assert r4.estimate <= r4.bound + 3 * r4.std_error


def test_transfer_ratio_n0_is_one():
    r = transfer_norm_ratio(0, 1.5, samples=100_000, seed=2)
    assert r.estimate == pytest.approx(1.0, abs=5 * r.std_error)


def test_transfer_ratio_decreasing():
    ests = [transfer_norm_ratio(n, 1.5, samples=20_000, seed=4).estimate for n in range(1, 6)]
    assert all(b < a for a, b in zip(ests, ests[1:]))


def test_transfer_ratio_thread_independent():
    a = transfer_norm_ratio(3, 1.25, samples=150_000, seed=9, threads=1)
    b = transfer_norm_ratio(3, 1.25, samples=150_000, seed=9, threads=3)
    assert a == b


def test_j_probe():
    full = j_set_probe(0, 1, 0.0, 0.0, samples=20_000, seed=3)
    assert full.estimate == 1.0 and full.status == "info"
    small = j_set_probe(0, 1, 3.0, 1.0, samples=20_000, seed=3)
    assert small.estimate < 0.1
    grid = [j_set_probe(1, 2, u, v, samples=20_000, seed=5).estimate
            for u, v in [(0.1, 0.1), (0.5, 0.1), (0.5, 0.4), (1.0, 0.4)]]
    assert all(b <= a for a, b in zip(grid, grid[1:]))
    assert 0 <= small.ci_low <= small.estimate <= small.ci_high <= 1


@pytest.mark.parametrize("args", [(-1, 1, 0, 0), (0, 0, 0, 0), (0, 1, -1, 0)])
def test_j_probe_validation(args):
    with pytest.raises(DomainError):
        j_set_probe(*args, samples=100)
