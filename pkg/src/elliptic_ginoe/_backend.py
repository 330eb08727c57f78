"""Exact conversions between the mpmath and gmpy2 arbitrary-precision backends.

Public APIs of this package speak mpmath ``mpf``. The hot inner loops
(kernel quadrature sums, the Jacobi eigensolver) run on ``gmpy2.mpfr``,
which is several times faster per operation. Both types are binary
floats with explicit mantissa/exponent, so conversion in either
direction is exact; rounding happens only in subsequent arithmetic at
whatever precision is then in force.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2
import mpmath
from mpmath.libmp import from_man_exp


def mpf_to_mpfr(x: mpmath.mpf) -> gmpy2.mpfr:
    """Convert an mpf to an mpfr without rounding.

    Accepts mpf only: wrapping other types in mpmath.mpf() would round
    them to whatever global precision happens to be active.
    """
    if not isinstance(x, mpmath.mpf):
        raise TypeError(f"expected mpf, got {type(x).__name__}")
    sign, man, exp, _ = x._mpf_
    if man == 0:
        if exp != 0:
            raise ValueError(f"cannot convert non-finite value {x!r}")
        return gmpy2.mpfr(0)
    with gmpy2.context(precision=max(man.bit_length(), 2)):
        r = gmpy2.mpfr(man)
        r = gmpy2.mul_2exp(r, exp) if exp >= 0 else gmpy2.div_2exp(r, -exp)
        # negate inside the block: gmpy2 rounds every operation, unary
        # minus included, at the active context precision
        return -r if sign else r


def mpfr_to_mpf(g: gmpy2.mpfr) -> mpmath.mpf:
    """Convert an mpfr to an mpf without rounding."""
    if not gmpy2.is_finite(g):
        raise ValueError(f"cannot convert non-finite value {g!r}")
    if g == 0:
        return mpmath.mpf(0)
    man, exp = g.as_mantissa_exp()
    return mpmath.mp.make_mpf(from_man_exp(int(man), int(exp)))


def fraction_to_mpfr(fr: Fraction) -> gmpy2.mpfr:
    """Round an exact rational to mpfr at the active gmpy2 precision."""
    return gmpy2.mpfr(fr.numerator) / gmpy2.mpfr(fr.denominator)


def fraction_to_mpf(fr: Fraction) -> mpmath.mpf:
    """Round an exact rational to mpf at the active mpmath precision."""
    return mpmath.mpf(fr.numerator) / mpmath.mpf(fr.denominator)
