"""Arbitrary-precision context and the special functions used downstream.

Everything here is a pure function of its arguments plus a
:class:`PrecisionContext` that fixes the binary working precision. Each
function computes with a few guard bits beyond ``ctx.bits`` so that the
value returned is accurate to a small multiple of ``ctx.eps`` relative.
Self-verification re-runs a computation at ``ctx.verify_bits`` (twice
the working precision by default) and checks agreement; the test suite
applies that certificate to every function in this module.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import gmpy2
import mpmath
import numpy as np
from mpmath import mp, mpf

from ._backend import mpfr_to_mpf
from .errors import ConvergenceError, DomainError, PoleError

ENV_BITS = "ELLIPTIC_GINOE_BITS"
DEFAULT_BITS = 256


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision in bits and the tolerances derived from it.

    eps is exactly 2**(1-bits), the classical unit-roundoff-style
    comparison tolerance. verify_bits is the elevated precision used for
    self-verification and defaults to twice the working precision.
    """

    bits: int
    verify_bits: int = field(default=0)

    def __post_init__(self):
        if self.bits < 64:
            raise DomainError(f"bits must be >= 64, got {self.bits}")
        if self.verify_bits == 0:
            object.__setattr__(self, "verify_bits", 2 * self.bits)
        if self.verify_bits < self.bits:
            raise DomainError("verify_bits must be >= bits")

    @property
    def eps(self) -> mpf:
        with mp.workprec(self.bits):
            return mpf(2) ** (1 - self.bits)

    def workprec(self, extra: int = 0):
        """mpmath precision guard for computations under this context."""
        return mp.workprec(self.bits + extra)

    def verifyprec(self, extra: int = 0):
        return mp.workprec(self.verify_bits + extra)

    def verified(self) -> "PrecisionContext":
        """The context used to re-run a computation for certification."""
        return PrecisionContext(bits=self.verify_bits, verify_bits=2 * self.verify_bits)


def default_context() -> PrecisionContext:
    """Context with the default working precision (env override in bits)."""
    bits = int(os.environ.get(ENV_BITS, DEFAULT_BITS))
    return PrecisionContext(bits=bits)


def log_gamma(x, ctx: PrecisionContext) -> mpf:
    """ln Gamma(x) for x > 0.

    Backed by mpmath's loggamma (argument-raising recurrence plus the
    classical asymptotic series), evaluated with guard bits; relative
    error is well under 8*ctx.eps. Exercised in practice at integer and
    half-integer arguments up to 2N.
    """
    with ctx.workprec(extra=16):
        xv = mpmath.mpmathify(x)
        if not xv > 0:
            raise DomainError(f"log_gamma requires x > 0, got {x}")
        return mpmath.loggamma(xv)


def hermite(n: int, x, ctx: PrecisionContext) -> mpf:
    """Physicists' Hermite polynomial H_n(x) by the three-term recurrence.

    H_0 = 1, H_1 = 2x, H_{n+1} = 2x H_n - 2n H_{n-1}.
    """
    if n < 0:
        raise DomainError(f"hermite degree must be >= 0, got {n}")
    with ctx.workprec(extra=16):
        xv = mpmath.mpmathify(x)
        if n == 0:
            return mpf(1)
        prev, cur = mpf(1), 2 * xv
        for m in range(1, n):
            prev, cur = cur, 2 * xv * cur - 2 * m * prev
        return cur


def bessel_i(nu: int, x, ctx: PrecisionContext) -> mpf:
    """Modified Bessel function I_nu(x) for nu in {0, 1}, x >= 0.

    Power series sum_k (x/2)^(2k+nu) / (k! (k+nu)!), summed until the
    next term drops below eps times the partial sum. Terms are positive,
    so there is no cancellation and the truncation error is bounded by
    the first omitted term.
    """
    if nu not in (0, 1):
        raise DomainError(f"bessel_i supports nu in {{0, 1}}, got {nu}")
    with ctx.workprec(extra=16):
        xv = mpmath.mpmathify(x)
        if xv < 0:
            raise DomainError(f"bessel_i requires x >= 0, got {x}")
        if xv == 0:
            return mpf(1) if nu == 0 else mpf(0)
        half = xv / 2
        q = half * half
        term = half if nu == 1 else mpf(1)
        total = term
        tol = mpf(2) ** (-(ctx.bits + 8))
        for k in range(1, 32 * ctx.bits):
            term *= q / (k * (k + nu))
            total += term
            if term < tol * total:
                return total
        raise ConvergenceError(f"bessel_i series did not converge for x={x}")


def hyp2f1(a, b, c, x, ctx: PrecisionContext) -> mpf:
    """Gauss hypergeometric 2F1(a, b; c; x) for real x <= 0.

    For x < -1/2 the Pfaff transformation
        2F1(a, b; c; x) = (1-x)^(-a) 2F1(a, c-b; c; x/(x-1))
    maps the argument into [0, 1), where the defining series converges
    (and, when c-b is a nonpositive integer, terminates). The slot to
    transform on is chosen so that termination is exploited when
    available.
    """
    with ctx.workprec(extra=16):
        av, bv, cv, xv = (mpmath.mpmathify(v) for v in (a, b, c, x))
        if cv <= 0 and cv == mpmath.floor(cv):
            raise PoleError(f"2F1 pole: c={c} is a nonpositive integer")
        if xv > 0:
            raise DomainError(f"hyp2f1 implemented for x <= 0, got {x}")
        if xv == 0:
            return mpf(1)
        prefactor = mpf(1)
        if xv < mpf(-1) / 2:
            # prefer the slot whose transformed parameter terminates the series
            if _is_nonpositive_int(cv - bv):
                av, bv = av, cv - bv
            elif _is_nonpositive_int(cv - av):
                av, bv = bv, cv - av
            else:
                bv = cv - bv
            y = xv / (xv - 1)
            prefactor = (1 - xv) ** (-av)
        else:
            y = xv
        total = mpf(1)
        term = mpf(1)
        tol = mpf(2) ** (-(ctx.bits + 8))
        small_streak = 0
        limit = 64 * ctx.bits + 4096
        for n in range(limit):
            term *= (av + n) * (bv + n) / ((cv + n) * (n + 1)) * y
            if term == 0:
                break
            total += term
            if abs(term) <= tol * abs(total):
                small_streak += 1
                if small_streak >= 2:
                    break
            else:
                small_streak = 0
        else:
            raise ConvergenceError(
                f"2F1 series stalled: a={a} b={b} c={c} x={x} "
                f"(transformed argument {mpmath.nstr(y, 8)}, {limit} terms)"
            )
        return prefactor * total


def _is_nonpositive_int(v) -> bool:
    return v <= 0 and v == mpmath.floor(v)


def c_alpha(alpha, ctx: PrecisionContext) -> mpf:
    """The weak-nonsymmetry constant e^(-a^2/2) (I_0(a^2/2) + I_1(a^2/2)).

    Equals 1 at alpha = 0 and decreases towards 0, staying in (0, 1].
    """
    with ctx.workprec(extra=16):
        av = mpmath.mpmathify(alpha)
        if av < 0:
            raise DomainError(f"c_alpha requires alpha >= 0, got {alpha}")
        h = av * av / 2
        return mpmath.exp(-h) * (bessel_i(0, h, ctx) + bessel_i(1, h, ctx))


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite nodes and weights for the weight e^(-x^2) on R.

    Nodes are the roots of H_m, exactly symmetric about 0 (mirrored from
    the polished positive roots), weights all positive with total mass
    sqrt(pi). The rule integrates polynomials of degree <= 2m-1 exactly.
    """

    order: int
    nodes: tuple
    weights: tuple


_RULE_CACHE: dict[tuple[int, int], QuadratureRule] = {}


def gauss_hermite_rule(m: int, ctx: PrecisionContext) -> QuadratureRule:
    """Order-m Gauss-Hermite rule at ctx precision.

    Double-precision roots seed a Newton iteration on H_m (derivative
    2m H_{m-1}), polished until the update falls below 2^-(bits+8)
    relative. Weights use w_i = 2^(m-1) m! sqrt(pi) / (m^2 H_{m-1}(x_i)^2).
    Rules are cached per (m, bits).
    """
    if m < 1:
        raise DomainError(f"quadrature order must be >= 1, got {m}")
    key = (m, ctx.bits)
    rule = _RULE_CACHE.get(key)
    if rule is not None:
        return rule

    seeds = np.polynomial.hermite.hermgauss(m)[0]
    prec = ctx.bits + 24
    with gmpy2.context(precision=prec):
        stop = gmpy2.exp2(-(ctx.bits + 8))
        pos_nodes = []
        for seed in seeds:
            if seed <= 0:
                continue
            x = gmpy2.mpfr(float(seed))
            for it in range(200):
                hm1, h = _hermite_pair(m, x)
                dx = h / (2 * m * hm1)
                x -= dx
                if abs(dx) <= stop * abs(x):
                    break
            else:
                raise ConvergenceError(f"Newton stalled on Hermite root near {seed}")
            pos_nodes.append(x)

        spi = gmpy2.sqrt(gmpy2.const_pi())
        wpref = gmpy2.exp2(m - 1) * gmpy2.factorial(m) * spi / (m * m)

        def weight(x):
            hm1, _ = _hermite_pair(m, x)
            return wpref / (hm1 * hm1)

        nodes, weights = [], []
        for x in reversed(pos_nodes):
            nodes.append(-x)
            weights.append(weight(x))
        if m % 2 == 1:
            nodes.append(gmpy2.mpfr(0))
            weights.append(weight(gmpy2.mpfr(0)))
        for x in pos_nodes:
            nodes.append(x)
            weights.append(weight(x))

    rule = QuadratureRule(
        order=m,
        nodes=tuple(mpfr_to_mpf(x) for x in nodes),
        weights=tuple(mpfr_to_mpf(w) for w in weights),
    )
    _RULE_CACHE[key] = rule
    return rule


def _hermite_pair(m: int, x):
    """(H_{m-1}(x), H_m(x)) by recurrence on the gmpy2 backend."""
    hm1, h = gmpy2.mpfr(1), 2 * x
    for n in range(1, m):
        hm1, h = h, 2 * x * h - 2 * n * hm1
    return hm1, h
