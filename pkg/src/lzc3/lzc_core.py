"""Model parameters, case split, and the closed-form 3x3 transition matrix.

The model couples a level with 1/tau diabatic energy (coefficient ``k2``) to
two linear levels with slopes ``beta1 < beta2`` through couplings ``g1, g2``.
Transition probabilities from tau -> 0+ to tau -> +infinity are elementary in
the exponential shorthands (kappa, p_i, q_i) except for three entries per
slope case, which carry squared moduli of Gauss hypergeometric functions
(the ``H`` factors); the remaining entries follow from double stochasticity.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSlopeError, DomainError
from .special_functions import CutSide, EvalResult, Hyp2F1Input, hyp2f1

__all__ = [
    "ModelParams",
    "Shorthands",
    "SlopeCase",
    "TransitionMatrix",
    "MIXED_CASE_CUT_SIDE",
    "shorthands",
    "classify",
    "h_factor",
    "transition_matrix",
    "reflected_params",
]

# Branch of the hypergeometric factors on the cut z > 1 (mixed-slope case
# only).  The closed forms are silent about the side; this constant was fixed
# once by comparing both sides against the ODE propagator at the reference
# mixed-slope point (k2=0.5, g1=0.5, g2=0.3, beta1=-0.15, beta2=0.3), where
# ABOVE_CUT agrees to ~1e-6 and BELOW_CUT is off by O(1) and breaks double
# stochasticity.  Re-asserted on a parameter grid in the test suite.
MIXED_CASE_CUT_SIDE = CutSide.ABOVE_CUT

_LEVEL_SWAP = (0, 2, 1)
_IDENTITY_PERM = (0, 1, 2)


@dataclass(frozen=True)
class ModelParams:
    """The five model parameters, with labels normalized so beta2 > beta1.

    If the constructor has to swap levels 1 and 2 to enforce the ordering,
    ``swapped`` records it; matrix-valued results are mapped back to the
    caller's original labeling on output.
    """

    k2: float
    g1: float
    g2: float
    beta1: float
    beta2: float
    swapped: bool = False

    def __post_init__(self):
        for name in ("k2", "g1", "g2", "beta1", "beta2"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v}")
        if self.g1 < 0 or self.g2 < 0:
            raise DomainError("couplings are magnitudes; require g1, g2 >= 0 "
                              "(complex phases are a gauge, see propagator.gauge_check)")
        if self.beta1 == 0.0 or self.beta2 == 0.0:
            raise DegenerateSlopeError("slopes must be nonzero")
        if self.beta1 == self.beta2:
            raise DegenerateSlopeError("slopes must differ")
        if self.beta1 > self.beta2:
            b1, b2 = self.beta2, self.beta1
            g1, g2 = self.g2, self.g1
            object.__setattr__(self, "beta1", b1)
            object.__setattr__(self, "beta2", b2)
            object.__setattr__(self, "g1", g1)
            object.__setattr__(self, "g2", g2)
            object.__setattr__(self, "swapped", not self.swapped)

    @property
    def permutation(self) -> tuple[int, int, int]:
        """Map from caller level labels to internal (normalized) labels."""
        return _LEVEL_SWAP if self.swapped else _IDENTITY_PERM

    def to_internal_level(self, level: int) -> int:
        return self.permutation[level]

    def to_user_matrix(self, p: np.ndarray) -> np.ndarray:
        """Re-express a matrix over internal levels in the caller's labels."""
        perm = list(self.permutation)
        return p[np.ix_(perm, perm)]


@dataclass(frozen=True)
class Shorthands:
    """Exponential shorthands entering every closed-form entry."""

    kappa: float  # exp(-pi k^2)
    q1: float     # g1^2 / beta1
    q2: float     # g2^2 / beta2
    p1: float     # exp(-pi g1^2 / |beta1|)
    p2: float     # exp(-pi g2^2 / |beta2|)
    C1: float     # k^2 - q1
    C2: float     # k^2 - q2


class SlopeCase(enum.Enum):
    BOTH_POSITIVE = "both_positive"   # beta2 > beta1 > 0
    MIXED = "mixed"                   # beta2 > 0 > beta1
    BOTH_NEGATIVE = "both_negative"   # 0 > beta2 > beta1


@dataclass(frozen=True)
class TransitionMatrix:
    """Raw 3x3 probabilities, p[i][j] = P(level i at 0+ -> level j at +inf).

    ``p`` keeps the unclamped values so that stochasticity residuals remain
    visible; use :meth:`clamped` for reporting.  ``tol`` is the accuracy the
    entries are claimed to (default 1e-6), ``eval_err`` the propagated
    hypergeometric error bound, and ``extended_domain`` flags k^2 < 0 inputs,
    where the closed forms are used beyond the regime stated alongside them.
    """

    p: np.ndarray
    case: SlopeCase
    tol: float = 1e-6
    eval_err: float = 0.0
    extended_domain: bool = False

    def clamped(self) -> np.ndarray:
        return np.clip(self.p, 0.0, 1.0)

    def row_sums(self) -> np.ndarray:
        return self.p.sum(axis=1)

    def col_sums(self) -> np.ndarray:
        return self.p.sum(axis=0)

    def stochasticity_residual(self) -> float:
        return float(max(np.max(np.abs(self.row_sums() - 1.0)),
                         np.max(np.abs(self.col_sums() - 1.0))))

    def range_residual(self) -> float:
        return float(max(np.max(-self.p), np.max(self.p - 1.0), 0.0))


def shorthands(params: ModelParams) -> Shorthands:
    """Evaluate the exponential shorthands for ``params``."""
    q1 = params.g1 ** 2 / params.beta1
    q2 = params.g2 ** 2 / params.beta2
    return Shorthands(
        kappa=math.exp(-math.pi * params.k2),
        q1=q1,
        q2=q2,
        p1=math.exp(-math.pi * params.g1 ** 2 / abs(params.beta1)),
        p2=math.exp(-math.pi * params.g2 ** 2 / abs(params.beta2)),
        C1=params.k2 - q1,
        C2=params.k2 - q2,
    )


def classify(params: ModelParams) -> SlopeCase:
    """Return the slope-sign case of the (normalized) parameters."""
    if params.beta1 > 0.0:
        return SlopeCase.BOTH_POSITIVE
    if params.beta2 > 0.0:
        return SlopeCase.MIXED
    return SlopeCase.BOTH_NEGATIVE


def _h_tuple(which: str, params: ModelParams) -> Hyp2F1Input:
    k2 = params.k2
    r1 = 0.5 * params.g1 ** 2 / params.beta1
    r2 = 0.5 * params.g2 ** 2 / params.beta2
    b1, b2 = params.beta1, params.beta2
    if which == "H10":
        return Hyp2F1Input(a=1.0 - 1j * r1, b=0.5 - 0.5j * k2,
                           c=1.0 - 1j * (r1 + r2), z=(b2 - b1) / b2)
    if which == "H20":
        return Hyp2F1Input(a=1.0 + 1j * r2, b=0.5 + 0.5j * k2,
                           c=1.0 + 1j * (r1 + r2), z=(b1 - b2) / b1)
    if which == "H12":
        return Hyp2F1Input(a=0.5 - 1j * (0.5 * k2 - r1 - r2), b=0.5 - 0.5j * k2,
                           c=1.5 - 1j * (0.5 * k2 - r2), z=b1 / (b1 - b2))
    if which == "H21":
        return Hyp2F1Input(a=0.5 + 1j * (0.5 * k2 - r1 - r2), b=0.5 + 0.5j * k2,
                           c=1.5 + 1j * (0.5 * k2 - r1), z=b2 / (b2 - b1))
    raise ValueError(f"unknown H factor {which!r}")


def _h_eval(which: str, params: ModelParams, cut_side: CutSide) -> EvalResult:
    base = _h_tuple(which, params)
    req = Hyp2F1Input(a=base.a, b=base.b, c=base.c, z=base.z, cut_side=cut_side)
    res = hyp2f1(req)
    sq = abs(res.value) ** 2
    err = 2.0 * abs(res.value) * res.abs_err + res.abs_err ** 2
    return EvalResult(value=sq, abs_err=err, method=res.method)


def h_factor(which: str, params: ModelParams,
             cut_side: CutSide | None = None) -> float:
    """Squared modulus |2F1(...)|^2 of the named factor, H10/H20/H12/H21.

    ``cut_side`` matters only when the implied argument exceeds 1 (H10 and
    H20 in the mixed-slope case); it defaults to the calibrated
    ``MIXED_CASE_CUT_SIDE``.
    """
    side = MIXED_CASE_CUT_SIDE if cut_side is None else cut_side
    return float(_h_eval(which, params, side).value.real)


def _expm1_over(x: float, s: float, limit: float) -> float:
    """(e^x - 1)/s with x proportional to s; ``limit`` is the s -> 0 value."""
    if s == 0.0:
        return limit
    return math.expm1(x) / s


def transition_matrix(params: ModelParams,
                      cut_side: CutSide | None = None,
                      tol: float = 1e-6) -> TransitionMatrix:
    """Assemble the closed-form transition probability matrix.

    Six entries are independent formulas (three elementary ones for the
    column out of level 0, plus the hypergeometric P10, P20 and P12 -- or P21
    for two negative slopes); the rest are doubly-stochastic complements.
    Zero coupling returns the identity.  Output rows/columns follow the
    caller's original level labeling.
    """
    side = MIXED_CASE_CUT_SIDE if cut_side is None else cut_side
    case = classify(params)
    sh = shorthands(params)
    g1, g2 = params.g1, params.g2
    b1, b2 = params.beta1, params.beta2
    kap = sh.kappa
    opk = 1.0 + kap

    if g1 == 0.0 and g2 == 0.0:
        p = np.eye(3)
        return TransitionMatrix(p=params.to_user_matrix(p), case=case, tol=tol,
                                extended_domain=params.k2 < 0)

    s = sh.q1 + sh.q2
    p = np.empty((3, 3))
    herr = 0.0

    if case is SlopeCase.BOTH_POSITIVE:
        h10 = _h_eval("H10", params, side)
        h20 = _h_eval("H20", params, side)
        h12 = _h_eval("H12", params, side)
        p1p2 = math.exp(-math.pi * s)
        # (1 - p1 p2)/(q1 + q2), finite as the couplings vanish together
        amp = _expm1_over(-math.pi * s, s, -math.pi) * (-1.0)
        p[0, 0] = (p1p2 + kap) / opk
        p[1, 0] = g1 ** 2 * amp * h10.value.real / (b2 * opk)
        p[2, 0] = g2 ** 2 * amp * h20.value.real / (b1 * opk)
        p[0, 1] = sh.p2 * (1.0 - sh.p1) / opk
        p[0, 2] = (1.0 - sh.p2) / opk
        p[1, 2] = (g1 ** 2 * sh.q2 * (sh.p2 + kap) * h12.value.real
                   / ((b2 - b1) * (1.0 + sh.C2 ** 2) * opk))
        herr = max(h10.abs_err, h20.abs_err, h12.abs_err)
    elif case is SlopeCase.MIXED:
        h10 = _h_eval("H10", params, side)
        h20 = _h_eval("H20", params, side)
        h12 = _h_eval("H12", params, side)
        # (p1 - p2)/(q1 + q2) = p2 (e^{pi s} - 1)/s, regular at q1 + q2 = 0
        rp = sh.p2 * _expm1_over(math.pi * s, s, math.pi)
        p[0, 0] = (sh.p2 + kap * sh.p1) / opk
        p[1, 0] = g1 ** 2 * rp * h10.value.real / (b2 * opk)
        p[2, 0] = -g2 ** 2 * kap * rp * h20.value.real / (b1 * opk)
        p[0, 1] = (1.0 - sh.p1) * kap / opk
        p[0, 2] = (1.0 - sh.p2) / opk
        p[1, 2] = (g1 ** 2 * sh.q2 * (sh.p2 + kap) * h12.value.real
                   / ((b2 - b1) * (1.0 + sh.C2 ** 2) * opk))
        herr = max(h10.abs_err, h20.abs_err, h12.abs_err)
    else:  # BOTH_NEGATIVE
        h10 = _h_eval("H10", params, side)
        h20 = _h_eval("H20", params, side)
        h21 = _h_eval("H21", params, side)
        p1p2 = math.exp(math.pi * s)      # q's are negative here
        amn = -_expm1_over(math.pi * s, s, math.pi)
        p[0, 0] = (1.0 + kap * p1p2) / opk
        p[1, 0] = g1 ** 2 * kap * amn * h10.value.real / (b2 * opk)
        p[2, 0] = g2 ** 2 * kap * amn * h20.value.real / (b1 * opk)
        p[0, 1] = (1.0 - sh.p1) * kap / opk
        p[0, 2] = sh.p1 * (1.0 - sh.p2) * kap / opk
        p[2, 1] = (g2 ** 2 * sh.q1 * (kap * sh.p1 + 1.0) * h21.value.real
                   / ((b1 - b2) * (1.0 + sh.C1 ** 2) * opk))
        herr = max(h10.abs_err, h20.abs_err, h21.abs_err)

    if case is SlopeCase.BOTH_NEGATIVE:
        p[1, 2] = p[2, 1] + p[0, 1] - p[1, 0]
    else:
        p[2, 1] = p[1, 2] + p[1, 0] - p[0, 1]
    p[1, 1] = 1.0 - p[1, 0] - p[1, 2]
    p[2, 2] = 1.0 - p[0, 2] - p[1, 2]

    return TransitionMatrix(
        p=params.to_user_matrix(p),
        case=case,
        tol=tol,
        eval_err=float(herr),
        extended_domain=params.k2 < 0,
    )


def reflected_params(params: ModelParams) -> tuple[ModelParams, tuple[int, int, int]]:
    """Reflect the model over the time axis.

    Maps the normalized fields (k2, g1, g2, beta1, beta2) to
    (-k2, g2, g1, -beta2, -beta1), which by time reversal plus complex
    conjugation leaves transition probabilities unchanged up to a relabeling
    of levels 1 and 2.  The returned permutation ``perm`` links the two
    matrices in the caller's frames:
    ``transition_matrix(params).p[i, j] ==
    transition_matrix(refl).p[perm[i], perm[j]]``.  On normalized inputs the
    map is an involution.
    """
    refl = ModelParams(
        k2=-params.k2,
        g1=params.g2,
        g2=params.g1,
        beta1=-params.beta2,
        beta2=-params.beta1,
    )
    perm = tuple(_LEVEL_SWAP[i] for i in params.permutation)
    return refl, perm
