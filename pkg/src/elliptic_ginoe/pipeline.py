"""End-to-end convenience layer: parameters -> kernel -> spectrum -> distribution.

Results are memoized per (params, bits) because the grid sweeps and the
cross-validation battery revisit the same parameter points many times.
Both key types are immutable value objects, so caching is sound.
"""

from __future__ import annotations

from functools import lru_cache

from .distribution import RealCountDistribution, probabilities_convolution
from .kernel import EnsembleParams, KernelMatrix, build_kernel_ginoe, build_kernel_integral
from .precision import PrecisionContext
from .spectral import Spectrum, eigen_sym


def compute_kernel(params: EnsembleParams, ctx: PrecisionContext) -> KernelMatrix:
    """Authoritative kernel for any tau in [0, 1): integral route, with
    the dedicated builder at tau = 0."""
    if params.tau == 0:
        return build_kernel_ginoe(params.n, ctx)
    return build_kernel_integral(params, ctx)


@lru_cache(maxsize=256)
def _spectrum_cached(params: EnsembleParams, bits: int) -> Spectrum:
    ctx = PrecisionContext(bits=bits)
    return eigen_sym(compute_kernel(params, ctx), ctx)


def compute_spectrum(params: EnsembleParams, ctx: PrecisionContext) -> Spectrum:
    return _spectrum_cached(params, ctx.bits)


@lru_cache(maxsize=256)
def _distribution_cached(params: EnsembleParams, bits: int) -> RealCountDistribution:
    ctx = PrecisionContext(bits=bits)
    return probabilities_convolution(_spectrum_cached(params, bits), ctx)


def compute_distribution(params: EnsembleParams, ctx: PrecisionContext) -> RealCountDistribution:
    return _distribution_cached(params, ctx.bits)
