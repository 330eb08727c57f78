"""Stirling-like saddle-point approximation of individual probabilities.

For r > 0 the exponential tilt of the Bernoulli-product distribution
has mean and variance

    a(r) = r sum_l lambda_l / (1 + (r-1) lambda_l),
    b(r) = r sum_l lambda_l (1 - lambda_l) / (1 + (r-1) lambda_l)^2,

with a strictly increasing from 0 to N/2, so a(r) = k has a unique
positive root r_k for interior k. The approximation reads

    p_{2k} ~ Z(r_k) / (r_k^k sqrt(2 pi b(r_k))),

evaluated in log space because Z(r_k) and r_k^k overflow any fixed
range long before N = 100. Endpoints k = 0 and k = N/2 are excluded:
their tilts degenerate (r -> 0, r -> infinity) while the exact values
are already product formulas.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import mpmath
from mpmath import mp, mpf

from .errors import ConvergenceError, EndpointError
from .precision import PrecisionContext
from .spectral import Spectrum, bernoulli_decomposition
from .distribution import RealCountDistribution
from . import output


@dataclass(frozen=True)
class SaddleResult:
    k: int
    r_k: mpf
    a_at_r: mpf
    b_at_r: mpf
    approx_p: mpf
    exact_p: Optional[mpf] = None
    ratio: Optional[mpf] = None


def mean_shift_a(spec: Spectrum, r, ctx: Optional[PrecisionContext] = None) -> mpf:
    """Tilted mean a(r); a(1) is the mean of the half count."""
    bits = ctx.bits if ctx is not None else spec.bits
    with mp.workprec(bits + 16):
        rv = mpmath.mpmathify(r)
        return rv * mpmath.fsum(lam / (1 + (rv - 1) * lam) for lam in spec.lambdas)


def var_shift_b(spec: Spectrum, r, ctx: Optional[PrecisionContext] = None) -> mpf:
    """Tilted variance b(r) = r a'(r); b(1) is the variance of the half count."""
    bits = ctx.bits if ctx is not None else spec.bits
    with mp.workprec(bits + 16):
        rv = mpmath.mpmathify(r)
        return rv * mpmath.fsum(
            lam * (1 - lam) / (1 + (rv - 1) * lam) ** 2 for lam in spec.lambdas
        )


def _solve_tilt(spec: Spectrum, target, ctx: PrecisionContext) -> mpf:
    """Unique positive root of a(r) = target for 0 < target < N/2.

    Brackets the root on a geometric grid in r (a is increasing), then
    runs Newton with a'(r) = b(r)/r, falling back to log-space bisection
    whenever a step leaves the bracket. Globally convergent despite the
    extreme dynamic range of the eigenvalues.
    """
    with ctx.workprec(extra=16):
        t = mpmath.mpmathify(target)
        lo = hi = mpf(1)
        if mean_shift_a(spec, 1, ctx) < t:
            for _ in range(20000):
                hi *= 8
                if mean_shift_a(spec, hi, ctx) >= t:
                    break
                lo = hi
            else:
                raise ConvergenceError(f"could not bracket a(r) = {target} from above")
        else:
            for _ in range(20000):
                lo /= 8
                if mean_shift_a(spec, lo, ctx) <= t:
                    break
                hi = lo
            else:
                raise ConvergenceError(f"could not bracket a(r) = {target} from below")

        r = mpmath.sqrt(lo * hi)
        tol = mpf(2) ** (-(ctx.bits // 2)) * max(t, mpf(1))
        for _ in range(64 + ctx.bits):
            fa = mean_shift_a(spec, r, ctx) - t
            if abs(fa) <= tol:
                return r
            if fa > 0:
                hi = r
            else:
                lo = r
            b = var_shift_b(spec, r, ctx)
            nxt = r - fa * r / b if b > 0 else None
            if nxt is None or not lo < nxt < hi:
                nxt = mpmath.sqrt(lo * hi)
            r = nxt
        raise ConvergenceError(f"tilt solve stalled at a(r) - k = {fa}", residual=fa)


def solve_saddle(spec: Spectrum, k: int, ctx: Optional[PrecisionContext] = None) -> mpf:
    """r_k solving a(r) = k for an interior k (0 < k < N/2)."""
    c = ctx if ctx is not None else PrecisionContext(bits=spec.bits)
    if not 0 < k < spec.dim:
        raise EndpointError(
            f"k = {k} is an endpoint of 0..{spec.dim}; use the exact product formulas"
        )
    bernoulli_decomposition(spec, c)
    return _solve_tilt(spec, k, c)


def stirling_approx(
    spec: Spectrum,
    k: int,
    ctx: Optional[PrecisionContext] = None,
    dist: Optional[RealCountDistribution] = None,
) -> SaddleResult:
    """Saddle-point approximation at k, optionally with the exact value attached.

    log p ~ sum log(1 + (r_k - 1) lambda) - k log r_k - log sqrt(2 pi b(r_k)).
    """
    c = ctx if ctx is not None else PrecisionContext(bits=spec.bits)
    r = solve_saddle(spec, k, c)
    with c.workprec(extra=16):
        a = mean_shift_a(spec, r, c)
        b = var_shift_b(spec, r, c)
        log_z = mpmath.fsum(mpmath.log(1 + (r - 1) * lam) for lam in spec.lambdas)
        log_p = log_z - k * mpmath.log(r) - mpmath.log(2 * mpmath.pi * b) / 2
        approx = mpmath.exp(log_p)
        exact = ratio = None
        if dist is not None:
            exact = dist.probs[k]
            ratio = approx / exact
    return SaddleResult(
        k=k, r_k=r, a_at_r=a, b_at_r=b, approx_p=approx, exact_p=exact, ratio=ratio
    )


def dump_saddle(results, ctx: PrecisionContext, stream) -> None:
    """CSV dump: k, r_k, b, approx_p, exact_p, ratio.

    The ratio column is derived from the printed approx and exact fields
    so the file round-trips bit-identically.
    """
    digits = output.digits_for_bits(ctx.bits)
    stream.write("k,r_k,b,approx_p,exact_p,ratio\n")
    for res in results:
        approx_str = output.format_mpf(res.approx_p, digits)
        exact_str = output.format_mpf(res.exact_p, digits) if res.exact_p is not None else ""
        ratio_str = output.derived_ratio(approx_str, exact_str, ctx)
        stream.write(
            f"{res.k},{output.format_mpf(res.r_k, digits)},"
            f"{output.format_mpf(res.b_at_r, digits)},{approx_str},{exact_str},{ratio_str}\n"
        )
