"""Exact three-state Landau-Zener-Coulomb transition probabilities.

Closed-form hypergeometric transition matrices plus two independent
cross-checks: brute-force propagation of the amplitude equations
(:mod:`lzc3.propagator`) and direct quadrature of the contour-integral
solution (:mod:`lzc3.contour`).
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    DegenerateSlopeError,
    DomainError,
    IntegrationFailure,
    NumericalError,
)
from .lzc_core import (  # noqa: F401
    MIXED_CASE_CUT_SIDE,
    ModelParams,
    Shorthands,
    SlopeCase,
    TransitionMatrix,
    classify,
    h_factor,
    reflected_params,
    shorthands,
    transition_matrix,
)
from .special_functions import (  # noqa: F401
    CutSide,
    EvalResult,
    Hyp2F1Input,
    gamma_c,
    hyp2f1,
    hyp2f1_euler_quadrature,
)
