"""Special functions: spot values, independent oracles, and the
precision-doubling certificate."""

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf

from elliptic_ginoe import (
    ConvergenceError,
    DomainError,
    PoleError,
    PrecisionContext,
    bessel_i,
    c_alpha,
    gauss_hermite_rule,
    hermite,
    hyp2f1,
    log_gamma,
)
from conftest import abs_err, rel_err


class TestPrecisionContext:
    def test_defaults(self):
        ctx = PrecisionContext(bits=256)
        assert ctx.verify_bits == 512
        with mp.workprec(300):
            assert ctx.eps == mpf(2) ** (-255)

    def test_rejects_small_bits(self):
        with pytest.raises(DomainError):
            PrecisionContext(bits=32)

    def test_rejects_verify_below_bits(self):
        with pytest.raises(DomainError):
            PrecisionContext(bits=128, verify_bits=64)


class TestLogGamma:
    def test_at_one(self, ctx256):
        assert log_gamma(1, ctx256) == 0

    def test_at_half(self, ctx256):
        with mp.workprec(300):
            target = mpmath.log(mpmath.sqrt(mpmath.pi))
        assert rel_err(log_gamma(mpf(1) / 2, ctx256), target) < mpf(2) ** -250

    def test_recurrence_oracle_7_5(self, ctx256):
        # Gamma(7.5) = 6.5 * 5.5 * ... * 0.5 * Gamma(0.5), accumulated exactly
        with mp.workprec(600):
            acc = mpmath.log(mpmath.sqrt(mpmath.pi))
            for i in range(7):
                acc += mpmath.log(mpf(1) / 2 + i)
        assert rel_err(log_gamma(mpf(15) / 2, ctx256), acc) < mpf(2) ** -250

    def test_domain(self, ctx256):
        for bad in (0, -3):
            with pytest.raises(DomainError):
                log_gamma(bad, ctx256)


class TestHermite:
    def test_degree_zero(self, ctx256):
        assert hermite(0, mpf("1.7"), ctx256) == 1

    def test_degree_two(self, ctx256):
        x = mpf("0.3")
        assert abs_err(hermite(2, x, ctx256), 4 * x * x - 2) < mpf(2) ** -250

    def test_h4_at_one(self, ctx256):
        # direct recurrence: H_4(x) = 16x^4 - 48x^2 + 12, so H_4(1) = -20
        assert hermite(4, 1, ctx256) == -20

    @pytest.mark.parametrize("x", ["0.3", "1.7"])
    @pytest.mark.parametrize("n", range(21))
    def test_parity(self, n, x, ctx256):
        xv = mpf(x)
        left = hermite(n, -xv, ctx256)
        right = (-1) ** n * hermite(n, xv, ctx256)
        assert abs_err(left, right) <= mpf(2) ** -240 * max(1, abs(right))

    @given(n=st.integers(0, 20), x=st.floats(-3, 3, allow_nan=False))
    @settings(max_examples=30, deadline=None)
    def test_parity_property(self, n, x):
        ctx = PrecisionContext(bits=128)
        left = hermite(n, -mpf(x), ctx)
        right = (-1) ** n * hermite(n, mpf(x), ctx)
        assert abs_err(left, right, bits=128) <= mpf(2) ** -110 * max(1, abs(right))


class TestBesselI:
    def test_i0_at_zero(self, ctx256):
        assert bessel_i(0, 0, ctx256) == 1

    def test_i1_at_zero(self, ctx256):
        assert bessel_i(1, 0, ctx256) == 0

    def test_against_reference_series(self, ctx256):
        # independent evaluation at doubled precision
        with mp.workprec(ctx256.verify_bits):
            target = mpmath.besseli(0, mpf(1) / 2)
        assert rel_err(bessel_i(0, mpf(1) / 2, ctx256), target) < 16 * ctx256.eps

    def test_domain(self, ctx256):
        with pytest.raises(DomainError):
            bessel_i(2, 1, ctx256)
        with pytest.raises(DomainError):
            bessel_i(0, -1, ctx256)


class TestHyp2F1:
    def test_at_zero(self, ctx256):
        assert hyp2f1(mpf(1) / 3, 2, mpf(7) / 2, 0, ctx256) == 1

    def test_asinh_identity(self, ctx256):
        # 2F1(1/2, 1/2; 3/2; -1) = asinh(1) = log(1 + sqrt(2))
        with mp.workprec(600):
            target = mpmath.log(1 + mpmath.sqrt(2))
        got = hyp2f1(mpf(1) / 2, mpf(1) / 2, mpf(3) / 2, -1, ctx256)
        assert rel_err(got, target) < 64 * ctx256.eps

    def test_reference_oracle_far_argument(self, ctx256):
        # Pfaff-transformed series vs an independent implementation
        args = (mpf(1) / 2, mpf(3) / 2, mpf(-5) / 2, mpf(-99))
        got = hyp2f1(*args, ctx256)
        with mp.workprec(ctx256.verify_bits):
            target = mpmath.hyp2f1(*args)
        assert rel_err(got, target) < 64 * ctx256.eps

    def test_terminating_polynomial(self, ctx256):
        # b = -2 terminates: 2F1(a, -2; c; x) = 1 - 2ax/c + a(a+1)x^2/(c(c+1))
        a, c, x = mpf(1) / 2, mpf(-3) / 2, mpf("-0.25")
        got = hyp2f1(a, -2, c, x, ctx256)
        target = 1 - 2 * a * x / c + a * (a + 1) * x * x / (c * (c + 1))
        assert rel_err(got, target) < 64 * ctx256.eps

    def test_pole(self, ctx256):
        with pytest.raises(PoleError):
            hyp2f1(1, 2, -3, mpf("-0.5"), ctx256)

    def test_positive_argument_rejected(self, ctx256):
        with pytest.raises(DomainError):
            hyp2f1(1, 2, 3, mpf("0.5"), ctx256)


class TestCAlpha:
    def test_at_zero(self, ctx256):
        assert c_alpha(0, ctx256) == 1

    def test_compose_bessel(self, ctx256):
        got = c_alpha(1, ctx256)
        with mp.workprec(600):
            target = mpmath.exp(mpf(-1) / 2) * (
                mpmath.besseli(0, mpf(1) / 2) + mpmath.besseli(1, mpf(1) / 2)
            )
        assert rel_err(got, target) < 64 * ctx256.eps

    def test_monotone_decreasing(self, ctx256):
        vals = [c_alpha(a, ctx256) for a in (0, mpf(1) / 2, 1, 2)]
        assert all(x > y for x, y in zip(vals, vals[1:]))
        assert all(0 < v <= 1 for v in vals)


class TestGaussHermite:
    def test_order_one(self, ctx256):
        rule = gauss_hermite_rule(1, ctx256)
        assert rule.nodes == (mpf(0),)
        with mp.workprec(300):
            assert rel_err(rule.weights[0], mpmath.sqrt(mpmath.pi)) < ctx256.eps

    def test_order_two_nodes(self, ctx256):
        rule = gauss_hermite_rule(2, ctx256)
        with mp.workprec(300):
            target = 1 / mpmath.sqrt(2)
        assert rel_err(rule.nodes[1], target) < 4 * ctx256.eps
        assert rule.nodes[0] == -rule.nodes[1]

    def test_symmetry_bit_exact(self, ctx256):
        for m in (2, 5, 8):
            rule = gauss_hermite_rule(m, ctx256)
            assert all(
                rule.nodes[i] == -rule.nodes[m - 1 - i]
                and rule.weights[i] == rule.weights[m - 1 - i]
                for i in range(m)
            )

    def test_total_mass(self, ctx256):
        for m in (1, 3, 10, 40):
            rule = gauss_hermite_rule(m, ctx256)
            with mp.workprec(300):
                total = mpmath.fsum(rule.weights)
                spi = mpmath.sqrt(mpmath.pi)
            assert abs_err(total, spi) < ctx256.eps * spi

    def test_quartic_moment_order_three(self, ctx256):
        # Int x^4 e^(-x^2) dx = (3/4) sqrt(pi), degree 4 <= 2*3 - 1
        rule = gauss_hermite_rule(3, ctx256)
        with mp.workprec(300):
            got = mpmath.fsum(w * x**4 for x, w in zip(rule.nodes, rule.weights))
            target = mpf(3) / 4 * mpmath.sqrt(mpmath.pi)
        assert rel_err(got, target) < 8 * ctx256.eps

    @pytest.mark.parametrize("m", [4, 9])
    def test_even_moments_exact(self, m, ctx256):
        # Int x^(2n) e^(-x^2) dx = Gamma(n + 1/2) for all 2n <= 2m - 1
        rule = gauss_hermite_rule(m, ctx256)
        with mp.workprec(320):
            for n in range(m):
                got = mpmath.fsum(w * x ** (2 * n) for x, w in zip(rule.nodes, rule.weights))
                target = mpmath.gamma(n + mpf(1) / 2)
                assert rel_err(got, target) < 32 * ctx256.eps

    def test_domain(self, ctx256):
        with pytest.raises(DomainError):
            gauss_hermite_rule(0, ctx256)


SPOT_CHECKS = [
    lambda ctx: log_gamma(mpf(15) / 2, ctx),
    lambda ctx: hermite(12, mpf("1.7"), ctx),
    lambda ctx: bessel_i(1, mpf("0.5"), ctx),
    lambda ctx: hyp2f1(mpf(1) / 2, mpf(1) / 2, mpf(3) / 2, mpf(-3), ctx),
    lambda ctx: c_alpha(mpf(2), ctx),
]


@pytest.mark.parametrize("fn", SPOT_CHECKS)
def test_precision_doubling_certificate(fn, ctx128):
    """Evaluating at bits and verify_bits must agree to 2^(-bits+8) relative."""
    base = fn(ctx128)
    verified = fn(ctx128.verified())
    assert rel_err(base, verified, bits=ctx128.verify_bits) <= mpf(2) ** (-ctx128.bits + 8)
