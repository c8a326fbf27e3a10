"""The frozen constants still agree with their mpmath derivations."""

import mpmath as mp
import pytest

import make_oracle_values as mk
import oracle_values as ov


def test_scalar_constants():
    a1 = mp.log(2 * mp.pi) - mp.euler
    assert float(a1) == ov.A_ONE
    assert float(mk.a_half()) == pytest.approx(ov.A_HALF, rel=1e-15)
    assert float(mp.zeta(2) ** 3 / (3 * mp.zeta(4))) == pytest.approx(ov.M2, rel=1e-15)
    assert float(2 * mp.exp(-a1)) == pytest.approx(ov.TWO_EXP_MINUS_A, rel=1e-15)


@pytest.mark.parametrize("pq", sorted(ov.PHI2))
def test_phi2_constants(pq):
    assert float(mk.phi2(*pq)) == pytest.approx(ov.PHI2[pq], rel=1e-15)


@pytest.mark.parametrize("rb", sorted(ov.C0))
def test_c0_constants(rb):
    assert float(mk.c0(*rb)) == pytest.approx(ov.C0[rb], rel=1e-15)
