"""Numerical laboratory for Segal entropy tau(h log h).

Two concrete models of positive integrable elements over a semifinite
algebra: discrete spectral densities (atoms plus analytic tails) and direct
sums of Hermitian matrix blocks under a weighted trace.
"""

from .spectral import (
    Atom,
    ExtendedEntropyValue,
    SpectralDensity,
    ZERO,
    l1_distance,
    scale,
    shift_plus_identity,
    trace,
    truncate,
    validate,
)
from .tails import (
    NONE,
    PowerSeq,
    TailBranch,
    TailFamily,
    custom_pair_sequence,
    geometric_over_square,
    inverse_log_square,
)
from .entropy import (
    EntropyReport,
    entropy,
    entropy_scale_law,
    entropy_value,
    shift_equivalence,
    von_neumann_entropy,
)
from .regularization import (
    QuadratureSettings,
    RegularizationParams,
    SweepResult,
    convergence_sweep,
    lipschitz_modulus,
    regularizer_scalar,
    trace_regularized,
    trace_regularized_quadrature,
)

__version__ = "0.1.0"
