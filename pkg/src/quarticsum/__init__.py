"""Exact and numerical tools for quadratic+quartic exponential sums.

Covers the sums themselves, the Diophantine counts behind their mean values,
the mean-value integrals, a numerical Van der Corput B-transform, and the
Weyl-sum pipeline for k-th powers.
"""

__version__ = "0.1.0"

from .errors import BudgetExceeded, ParameterError, PrecisionWarning
from .expsum import (
    CoefficientSequence,
    IntRange,
    PhaseSpectrum,
    QuarticPhase,
    build_spectrum,
    eval_sum,
    max_partial_sum,
)
from .diophantine import (
    BoxQuery,
    CountResult,
    count_bruteforce,
    count_spectral,
    fejer_hat,
    fejer_kernel,
    fejer_weighted_count,
    lemma2_product_gap,
)
from .moments import (
    MomentQuery,
    MomentResult,
    exponent_recurrence,
    fit_exponent,
    gamma_kernel,
    integral_I,
    integral_R,
    moment_exact,
    moment_quadrature,
)
from .stationary_phase import (
    SmoothPhase,
    b_transform_residual,
    expansion_value,
    invert_derivative,
    transform_value,
    validate_domain,
)
from .weyl import (
    RationalApprox,
    SievePairs,
    WeylQuery,
    best_rational,
    heathbrown_bounds,
    near_integer_count,
    sieve_pair_count,
    symmetric_differences,
    theorem4_report,
    weyl_sum,
)
