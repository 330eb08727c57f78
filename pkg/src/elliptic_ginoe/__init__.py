"""Certified-precision statistics of real eigenvalue counts for the
elliptic Ginibre orthogonal ensemble.

The pipeline: a symmetric kernel matrix built from the ensemble
parameters, its eigenvalues (all in (0, 1)), the Bernoulli-product
generating function they factorize, and from there exact probabilities,
moments, saddle-point approximations, Gaussian-comparison diagnostics,
and an independent Monte Carlo validator.
"""

from .errors import (
    ConvergenceError,
    CrossCheckError,
    DegenerateArgumentError,
    DomainError,
    EllipticGinoeError,
    EndpointError,
    FactorizationViolationError,
    PoleError,
    PrecisionOverflowError,
    ReliabilityWarning,
)
from .precision import (
    PrecisionContext,
    QuadratureRule,
    bessel_i,
    c_alpha,
    default_context,
    gauss_hermite_rule,
    hermite,
    hyp2f1,
    log_gamma,
)
from .kernel import (
    EnsembleParams,
    KernelMatrix,
    ReconciliationReport,
    build_kernel_ginoe,
    build_kernel_hypergeometric,
    build_kernel_integral,
)
from .spectral import Spectrum, bernoulli_decomposition, determinant, eigen_sym
from .distribution import (
    GFZeros,
    LogConcavityCertificate,
    RealCountDistribution,
    gf_eval,
    log_concavity_check,
    moments_asymptotic,
    moments_asymptotic_fixed,
    moments_asymptotic_weak,
    moments_exact,
    probabilities_convolution,
    probabilities_dft,
    zeros,
)
from .saddle import SaddleResult, mean_shift_a, solve_saddle, stirling_approx, var_shift_b
from .gaussian_compare import LCLTProfile, clt_distance, diff_profile, sup_lclt
from .montecarlo import MCResult, count_real_eigs, empirical_distribution, sample_elliptic_ginoe
from .pipeline import compute_distribution, compute_kernel, compute_spectrum

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "CrossCheckError",
    "DegenerateArgumentError",
    "DomainError",
    "EllipticGinoeError",
    "EndpointError",
    "FactorizationViolationError",
    "PoleError",
    "PrecisionOverflowError",
    "ReliabilityWarning",
    "PrecisionContext",
    "QuadratureRule",
    "bessel_i",
    "c_alpha",
    "default_context",
    "gauss_hermite_rule",
    "hermite",
    "hyp2f1",
    "log_gamma",
    "EnsembleParams",
    "KernelMatrix",
    "ReconciliationReport",
    "build_kernel_ginoe",
    "build_kernel_hypergeometric",
    "build_kernel_integral",
    "Spectrum",
    "bernoulli_decomposition",
    "determinant",
    "eigen_sym",
    "GFZeros",
    "LogConcavityCertificate",
    "RealCountDistribution",
    "gf_eval",
    "log_concavity_check",
    "moments_asymptotic",
    "moments_asymptotic_fixed",
    "moments_asymptotic_weak",
    "moments_exact",
    "probabilities_convolution",
    "probabilities_dft",
    "zeros",
    "SaddleResult",
    "mean_shift_a",
    "solve_saddle",
    "stirling_approx",
    "var_shift_b",
    "LCLTProfile",
    "clt_distance",
    "diff_profile",
    "sup_lclt",
    "MCResult",
    "count_real_eigs",
    "empirical_distribution",
    "sample_elliptic_ginoe",
    "compute_distribution",
    "compute_kernel",
    "compute_spectrum",
    "__version__",
]
