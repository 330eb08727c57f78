import mpmath
import pytest
from mpmath import mp, mpf

from elliptic_ginoe import (
    EnsembleParams,
    PrecisionContext,
    Spectrum,
    compute_distribution,
    compute_spectrum,
)


@pytest.fixture(scope="session")
def ctx128():
    return PrecisionContext(bits=128)


@pytest.fixture(scope="session")
def ctx256():
    return PrecisionContext(bits=256)


@pytest.fixture(scope="session")
def spec_80_half(ctx256):
    return compute_spectrum(EnsembleParams(n=80, tau="0.5"), ctx256)


@pytest.fixture(scope="session")
def dist_80_half(ctx256):
    return compute_distribution(EnsembleParams(n=80, tau="0.5"), ctx256)


def rel_err(a, b, bits=256):
    """|a/b - 1| evaluated with enough guard precision to be trustworthy."""
    with mp.workprec(bits + 32):
        a, b = mpmath.mpmathify(a), mpmath.mpmathify(b)
        if b == 0:
            return abs(a)
        return abs(a - b) / abs(b)


def abs_err(a, b, bits=256):
    with mp.workprec(bits + 32):
        return abs(mpmath.mpmathify(a) - mpmath.mpmathify(b))


def synthetic_spectrum(lambdas, bits=256):
    """Spectrum built directly from given Bernoulli parameters (tests only)."""
    with mp.workprec(bits + 16):
        lams = tuple(sorted((mpf(l) for l in lambdas), reverse=True))
    return Spectrum(
        lambdas=lams, source=None, residual=mpf(0), bits=bits, internal_bits=bits
    )
