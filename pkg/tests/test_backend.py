"""Round-trip exactness of the mpmath <-> gmpy2 conversions."""

import gmpy2
import mpmath
import pytest
from mpmath import mp, mpf

from elliptic_ginoe._backend import (
    fraction_to_mpf,
    fraction_to_mpfr,
    mpf_to_mpfr,
    mpfr_to_mpf,
)
from fractions import Fraction


@pytest.mark.parametrize("bits", [64, 256, 700])
def test_roundtrip_exact(bits):
    with mp.workprec(bits):
        values = [
            mpmath.sqrt(mpf(2)),
            -mpmath.pi,
            mpf(2) ** (-100000),
            mpf(3) * 2 ** 50000,
            mpf(0),
            mpf(1) / 3,
        ]
    for v in values:
        assert mpfr_to_mpf(mpf_to_mpfr(v)) == v


def test_roundtrip_other_direction():
    with gmpy2.context(precision=300):
        g = gmpy2.sqrt(gmpy2.mpfr(5))
    assert mpf_to_mpfr(mpfr_to_mpf(g)) == g


def test_mpf_to_mpfr_rejects_non_mpf():
    # wrapping other types would silently round at ambient precision
    with pytest.raises(TypeError):
        mpf_to_mpfr(0.5)


def test_mpf_to_mpfr_rejects_inf():
    with pytest.raises(ValueError):
        mpf_to_mpfr(mpf("inf"))


def test_fraction_conversions_round_at_active_precision():
    fr = Fraction(1, 3)
    with gmpy2.context(precision=200):
        g = fraction_to_mpfr(fr)
    assert abs(float(g) - 1 / 3) < 1e-15
    with mp.workprec(200):
        m = fraction_to_mpf(fr)
        assert abs(m - mpf(1) / 3) == 0
