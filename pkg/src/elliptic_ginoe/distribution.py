"""Generating function, exact probabilities, zeros, moments, log-concavity.

With lambda_1..lambda_M the kernel eigenvalues (M = N/2), the
generating function of the real-eigenvalue-count probabilities is

    Z(z) = prod_l (1 + (z - 1) lambda_l) = sum_k p_{2k} z^k,

the distribution of a sum of M independent Bernoulli variables with
success probabilities lambda_l. Coefficient extraction by iterated
convolution of the (1 - lambda, lambda) pairs involves only nonnegative
summands, so even coefficients near 1e-700 come out with full relative
accuracy; the discrete-Fourier route through roots of unity is kept as
an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import mpmath
from mpmath import mp, mpf

from ._backend import fraction_to_mpf
from .errors import CrossCheckError, DomainError
from .kernel import EnsembleParams
from .precision import PrecisionContext, c_alpha
from .spectral import Spectrum, bernoulli_decomposition
from . import output


@dataclass(frozen=True)
class RealCountDistribution:
    """Probabilities p_{2k} of seeing exactly 2k real eigenvalues, k = 0..N/2.

    mean_nr and var_nr are the exact moments of the full count (twice /
    four times the Bernoulli-sum moments).
    """

    params: EnsembleParams
    probs: tuple
    mean_nr: mpf
    var_nr: mpf
    bits: int

    @property
    def half_count(self) -> int:
        return len(self.probs) - 1


@dataclass(frozen=True)
class GFZeros:
    """Zeros z_p = 1 - 1/lambda_p of the generating function.

    All lie on the negative real axis when every lambda is in (0, 1);
    max_residual_ratio records how close |Z(z_p)| came to zero relative
    to the no-cancellation bound prod(1 + |z_p - 1| lambda).
    """

    zeros: tuple
    max_residual_ratio: mpf


def gf_eval(spec: Spectrum, z, ctx: Optional[PrecisionContext] = None):
    """Z(z) = prod(1 + (z - 1) lambda), evaluated factor by factor."""
    bits = ctx.bits if ctx is not None else spec.bits
    with mp.workprec(bits + 16):
        zv = mpmath.mpmathify(z)
        acc = mpmath.mpf(1) if isinstance(zv, mpf) else mpmath.mpc(1)
        w = zv - 1
        for lam in spec.lambdas:
            acc *= 1 + w * lam
        return acc


def probabilities_convolution(spec: Spectrum, ctx: PrecisionContext) -> RealCountDistribution:
    """Exact p_{2k} by iterated convolution of the Bernoulli factors."""
    pairs = bernoulli_decomposition(spec, ctx)
    with ctx.workprec(extra=32):
        probs = [mpf(1)]
        for lam, one_minus in pairs:
            nxt = [one_minus * probs[0]]
            for i in range(1, len(probs)):
                nxt.append(one_minus * probs[i] + lam * probs[i - 1])
            nxt.append(lam * probs[-1])
            probs = nxt
        mean, var = moments_exact(spec, ctx)
    return RealCountDistribution(
        params=spec.source,
        probs=tuple(probs),
        mean_nr=mean,
        var_nr=var,
        bits=ctx.bits,
    )


def dft_coefficients(spec: Spectrum, points: int, ctx: PrecisionContext):
    """Raw coefficients (1/L) sum_l Z(w^l) w^(-lk) at L = points roots of unity.

    With points >= M+1 these are the p_{2k}; with points = M the k = 0
    output aliases to p_0 + p_{2M} (the generating polynomial has degree
    M). Runs at verification precision: the transform's error is
    *absolute* (of order L * 2^-prec), so doubling the precision is what
    makes the advertised relative tolerance reachable for small entries.
    """
    if points < 1:
        raise DomainError("need at least one evaluation point")
    work = max(ctx.verify_bits, 2 * ctx.bits)
    work_ctx = PrecisionContext(bits=work)
    with mp.workprec(work + 16):
        ls = range(points)
        zs = [gf_eval(spec, mpmath.expjpi(mpf(2 * l) / points), work_ctx) for l in ls]
        coeffs = []
        for k in range(points):
            acc = mpmath.mpc(0)
            for l in ls:
                acc += zs[l] * mpmath.expjpi(mpf(-2 * l * k) / points)
            coeffs.append(acc.real / points)
        return tuple(coeffs)


def probabilities_dft(
    spec: Spectrum,
    ctx: PrecisionContext,
    points: Optional[int] = None,
    cross_check: bool = True,
) -> RealCountDistribution:
    """Independent probability extraction via roots of unity.

    points defaults to M+1 (the minimum alias-free count for a degree-M
    polynomial). Entries below the transform's absolute resolution are
    reported as 0. With cross_check enabled the result is compared
    against the convolution route and a disagreement raises.
    """
    m = spec.dim
    if points is None:
        points = m + 1
    if points < m + 1:
        raise DomainError(
            f"need at least {m + 1} points for degree {m}; "
            "use dft_coefficients directly to study aliasing"
        )
    raw = dft_coefficients(spec, points, ctx)
    work = max(ctx.verify_bits, 2 * ctx.bits)
    with mp.workprec(work):
        floor = (2 * points) * mpf(2) ** (-work + 4)
        probs = tuple(p if abs(p) > floor else max(p, mpf(0)) for p in raw[: m + 1])
        mean, var = moments_exact(spec, ctx)
    dist = RealCountDistribution(
        params=spec.source, probs=probs, mean_nr=mean, var_nr=var, bits=ctx.bits
    )
    if cross_check:
        reference = probabilities_convolution(spec, ctx)
        rel_tol = mpf(2) ** (-(ctx.bits // 2))
        entry_floor = mpf(10) ** (-(ctx.bits // 4))
        with mp.workprec(work):
            for k, (a, b) in enumerate(zip(dist.probs, reference.probs)):
                if b > entry_floor and abs(a - b) > rel_tol * b:
                    raise CrossCheckError(
                        f"DFT and convolution disagree at k={k}: "
                        f"{mpmath.nstr(a, 12)} vs {mpmath.nstr(b, 12)}"
                    )
    return dist


def zeros(spec: Spectrum, ctx: Optional[PrecisionContext] = None) -> GFZeros:
    """Zero locations z_p = 1 - 1/lambda_p, verified against Z itself.

    Each |Z(z_p)| must be tiny relative to the no-cancellation product
    bound; failure indicates an inconsistent spectrum and raises.
    """
    c = ctx if ctx is not None else PrecisionContext(bits=spec.bits)
    bernoulli_decomposition(spec, c)
    with c.workprec(extra=16):
        zs = tuple((lam - 1) / lam for lam in spec.lambdas)
        worst = mpf(0)
        for zp in zs:
            bound = mpf(1)
            for lam in spec.lambdas:
                bound *= 1 + abs(zp - 1) * lam
            ratio = abs(gf_eval(spec, zp, c)) / bound
            if ratio > worst:
                worst = ratio
        if worst > mpf(2) ** (-(c.bits // 2)):
            raise CrossCheckError(
                f"generating function not small at its computed zeros: ratio {worst}"
            )
    return GFZeros(zeros=zs, max_residual_ratio=worst)


def moments_exact(spec: Spectrum, ctx: Optional[PrecisionContext] = None):
    """(mean, variance) of the full count: (2 sum lambda, 4 sum lambda(1-lambda))."""
    bits = ctx.bits if ctx is not None else spec.bits
    with mp.workprec(bits + 16):
        mean = 2 * mpmath.fsum(spec.lambdas)
        var = 4 * mpmath.fsum(lam * (1 - lam) for lam in spec.lambdas)
        return mean, var


def moments_asymptotic_fixed(n: int, tau, ctx: PrecisionContext):
    """Large-N moments at fixed ellipticity:
    mean ~ sqrt((2/pi) (1+tau)/(1-tau) N), variance ~ (2 - sqrt(2)) mean."""
    with ctx.workprec(extra=16):
        t = mpmath.mpmathify(tau)
        if t >= 1:
            raise DomainError("fixed-tau asymptotics require tau < 1")
        mean = mpmath.sqrt(2 / mpmath.pi * (1 + t) / (1 - t) * n)
        return mean, (2 - mpmath.sqrt(2)) * mean


def moments_asymptotic_weak(n: int, alpha, ctx: PrecisionContext):
    """Weak-nonsymmetry moments: mean ~ c(alpha) N,
    variance ~ (2 - 2 c(sqrt(2) alpha) / c(alpha)) mean."""
    with ctx.workprec(extra=16):
        a = mpmath.mpmathify(alpha)
        mean = c_alpha(a, ctx) * n
        factor = 2 - 2 * c_alpha(mpmath.sqrt(2) * a, ctx) / c_alpha(a, ctx)
        return mean, factor * mean


def moments_asymptotic(params: EnsembleParams, ctx: PrecisionContext):
    """Dispatch on the parametrization: alpha set selects the weak branch."""
    with ctx.workprec(extra=16):
        if params.alpha is not None:
            return moments_asymptotic_weak(params.n, fraction_to_mpf(params.alpha), ctx)
        return moments_asymptotic_fixed(params.n, params.tau_mpf(ctx), ctx)


@dataclass(frozen=True)
class LogConcavityCertificate:
    """Outcome of the multiplicative log-concavity check p_k^2 >= p_{k+1} p_{k-1}."""

    passed: bool
    checked: int
    worst_margin: mpf
    worst_relative_margin: mpf
    worst_k: int


def log_concavity_check(dist: RealCountDistribution) -> LogConcavityCertificate:
    """Verify p_{2k}^2 >= p_{2(k+1)} p_{2(k-1)} at every interior k.

    The multiplicative form avoids logarithms of values near the
    precision floor. Failure is reported in the certificate, never
    raised.
    """
    with mp.workprec(dist.bits + 16):
        worst = None
        worst_rel = None
        worst_k = -1
        checked = 0
        for k in range(1, len(dist.probs) - 1):
            p = dist.probs[k]
            if p <= 0:
                continue
            checked += 1
            margin = p * p - dist.probs[k + 1] * dist.probs[k - 1]
            rel = margin / (p * p)
            if worst is None or rel < worst_rel:
                worst, worst_rel, worst_k = margin, rel, k
        if checked == 0:
            return LogConcavityCertificate(True, 0, mpf(0), mpf(0), -1)
        return LogConcavityCertificate(
            passed=worst >= 0,
            checked=checked,
            worst_margin=worst,
            worst_relative_margin=worst_rel,
            worst_k=worst_k,
        )


def confidence_flag(p: mpf, bits: int) -> str:
    """Probabilities below the precision floor are flagged, not suppressed."""
    return "reduced" if p < mpf(2) ** (-bits + 32) else "full"


def dump_distribution(dist: RealCountDistribution, ctx: PrecisionContext, stream) -> None:
    """CSV dump: k, two_k, p, log10_p, confidence_flag.

    log10_p is recomputed from the printed p so that re-parsing the file
    and re-deriving the column reproduces it bit-identically.
    """
    digits = output.digits_for_bits(ctx.bits)
    stream.write(f"# N={dist.params.n} tau={output.format_fraction(dist.params.tau, digits)}\n")
    stream.write(f"# bits={dist.bits}\n")
    stream.write(f"# mean_NR={output.format_mpf(dist.mean_nr, digits)}\n")
    stream.write(f"# var_NR={output.format_mpf(dist.var_nr, digits)}\n")
    stream.write("k,two_k,p,log10_p,confidence_flag\n")
    for k, p in enumerate(dist.probs):
        p_str = output.format_mpf(p, digits)
        log_str = output.derived_log10(p_str, ctx)
        stream.write(f"{k},{2 * k},{p_str},{log_str},{confidence_flag(p, dist.bits)}\n")
