"""Brute-force oracle: numerical propagation of the amplitude equations.

Integration happens in the interaction picture, a~ = a e^{i k^2 ln|tau|},
b~_j = b_j e^{i beta_j tau^2/2}, whose right-hand side is bounded with phases
phi_j(tau) = k^2 ln|tau| - beta_j tau^2/2.  Because |phi_j'| -> infinity at
both ends of the scattering interval, the truncated pieces are cheap to
control analytically:

* the (0, eps) leg contributes O(g eps) and is absorbed by a first-order
  start correction (integral of tau^{+-i k^2}),
* the (T, infinity) tail contributes one integration-by-parts boundary term
  per component, g |a~(T)| / |phi'(T)|, which is applied as an endpoint
  correction and reported as ``conv_err`` (the estimate is reported whether
  or not the correction is applied).

The stepper is a Dormand-Prince 8(5,3) embedded pair: the compiled kernel in
``lzc3._rk_core`` when available, otherwise SciPy's DOP853 (same tableau).
Set ``LZC3_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IntegrationFailure
from .lzc_core import ModelParams, TransitionMatrix, classify

__all__ = [
    "IntegrationSettings",
    "PropagationResult",
    "StateVector",
    "backend",
    "propagate",
    "propagate_interval",
    "numeric_transition_matrix",
    "gauge_check",
]

if os.environ.get("LZC3_PURE_PYTHON", "").strip().lower() in {"1", "true", "yes"}:
    _rk_core = None
else:
    try:
        from . import _rk_core
    except ImportError:  # pragma: no cover - depends on build environment
        _rk_core = None


def backend() -> str:
    """Which integrator backend is active: ``"compiled"`` or ``"python"``."""
    return "python" if _rk_core is None else "compiled"


@dataclass(frozen=True)
class IntegrationSettings:
    """Propagation window and step-controller targets.

    ``epsilon`` may be exactly 0 only when k^2 = 0, where the equations are
    regular at tau = 0 and no start correction is needed.
    """

    # rel_tol 1e-11 (not 1e-10) keeps the accumulated norm drift below 1e-8
    # even for the ~3e6-step runs that the small-slope corner of the
    # verification ranges produces
    epsilon: float
    t_final: float
    rel_tol: float = 1e-11
    abs_tol: float = 1e-12
    max_steps: int = 50_000_000
    tail_correction: bool = True
    conv_tol: float = 1e-3

    def __post_init__(self):
        if not (0.0 <= self.epsilon < self.t_final):
            raise DomainError("need 0 <= epsilon < t_final")
        if not (0.0 < self.rel_tol <= 1e-2 and 0.0 < self.abs_tol <= 1e-2):
            raise DomainError("tolerances must lie in (0, 1e-2]")
        if self.max_steps < 1000:
            raise DomainError("max_steps unreasonably small")

    @classmethod
    def for_params(cls, params: ModelParams, conv_tol: float = 1e-3,
                   **overrides) -> "IntegrationSettings":
        """Defaults tied to the parameter scales.

        Start time eps = min(1e-3, tol/(10 max(g1, g2, 1))) keeps the (0, eps)
        leakage bound g*eps well under ``conv_tol`` (eps = 0 when k^2 = 0);
        end time T = max(50, 20/sqrt(min|beta| * tol)) makes the
        post-correction tail error O(g tol / 400).
        """
        gmax = max(params.g1, params.g2, 1.0)
        eps = 0.0 if params.k2 == 0.0 else min(1e-3, conv_tol / (10.0 * gmax))
        bmin = min(abs(params.beta1), abs(params.beta2))
        t_final = max(50.0, 20.0 / math.sqrt(bmin * conv_tol))
        kw = dict(epsilon=eps, t_final=t_final, conv_tol=conv_tol)
        kw.update(overrides)
        return cls(**kw)


@dataclass(frozen=True)
class StateVector:
    """Three interaction-picture amplitudes (a~, b1~, b2~)."""

    amp0: complex
    amp1: complex
    amp2: complex

    @classmethod
    def from_array(cls, y) -> "StateVector":
        return cls(complex(y[0]), complex(y[1]), complex(y[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.amp0, self.amp1, self.amp2], dtype=complex)

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


@dataclass(frozen=True)
class PropagationResult:
    """Converged final populations of one scattering run."""

    populations: np.ndarray      # |amplitudes|^2, caller's level labels
    conv_err: float              # estimated distance from the infinite-time limit
    norm_drift: float            # |norm^2 - 1| of the raw integration
    steps_used: int
    amplitudes: np.ndarray       # corrected final interaction-picture amplitudes


def _integrate_compiled(k2, g1, g2, beta1, beta2, t0, t1, y0, settings):
    y, steps, status = _rk_core.integrate(
        k2, complex(g1), complex(g2), beta1, beta2, t0, t1,
        np.ascontiguousarray(y0, dtype=complex),
        settings.rel_tol, settings.abs_tol, settings.max_steps)
    if status == _rk_core.STATUS_MAX_STEPS:
        raise IntegrationFailure("step budget exhausted", steps=steps, t0=t0, t1=t1)
    if status != _rk_core.STATUS_OK:
        raise IntegrationFailure("step size underflow", steps=steps, t0=t0, t1=t1)
    return y, int(steps)


def _integrate_scipy(k2, g1, g2, beta1, beta2, t0, t1, y0, settings):
    from scipy.integrate import solve_ivp

    g1c, g2c = complex(g1), complex(g2)

    def rhs(tau, y):
        lg = k2 * math.log(abs(tau)) if k2 != 0.0 else 0.0
        e1 = cmath.exp(1j * (lg - 0.5 * beta1 * tau * tau))
        e2 = cmath.exp(1j * (lg - 0.5 * beta2 * tau * tau))
        return np.array([
            -1j * (g1c * e1 * y[1] + g2c * e2 * y[2]),
            -1j * g1c.conjugate() * e1.conjugate() * y[0],
            -1j * g2c.conjugate() * e2.conjugate() * y[0],
        ])

    sol = solve_ivp(rhs, (t0, t1), np.asarray(y0, dtype=complex),
                    method="DOP853", rtol=settings.rel_tol, atol=settings.abs_tol)
    if not sol.success:  # pragma: no cover
        raise IntegrationFailure(f"solve_ivp failed: {sol.message}", t0=t0, t1=t1)
    return sol.y[:, -1].copy(), int(sol.t.size)


def _raw_integrate(k2, g1, g2, beta1, beta2, t0, t1, y0, settings):
    """Integrate t0 -> t1 (kernel or SciPy fallback); returns (y, steps)."""
    if t1 == t0:
        return np.asarray(y0, dtype=complex).copy(), 0
    if _rk_core is not None:
        return _integrate_compiled(k2, g1, g2, beta1, beta2, t0, t1, y0, settings)
    return _integrate_scipy(k2, g1, g2, beta1, beta2, t0, t1, y0, settings)


def _phase(k2, beta, tau):
    lg = k2 * math.log(abs(tau)) if k2 != 0.0 else 0.0
    return lg - 0.5 * beta * tau * tau


def _phase_rate(k2, beta, tau):
    return k2 / tau - beta * tau


def _eps_integral(k2, eps, sign):
    """int_0^eps tau^{+-i k^2} dtau = eps^{1 +- i k^2} / (1 +- i k^2)."""
    ik = 1j * sign * k2
    return eps * cmath.exp(ik * math.log(eps)) / (1.0 + ik) if eps > 0 else 0.0


def _tail_terms(k2, g1, g2, beta1, beta2, tau):
    """Per-level boundary factors g_j e^{+-i phi_j}/phi_j' at tau."""
    out = []
    for g, beta in ((g1, beta1), (g2, beta2)):
        ph = _phase(k2, beta, tau)
        rate = _phase_rate(k2, beta, tau)
        out.append((g, cmath.exp(1j * ph), rate))
    return out


def _propagate_internal(params, g1, g2, internal_level, direction, settings):
    """Run one scattering propagation in internal (normalized) labels.

    ``g1, g2`` may be complex (gauge checks); magnitudes match ``params``.
    Returns (populations[3], conv_err, norm_drift, steps, amplitudes[3]).
    """
    k2 = params.k2
    b1, b2 = params.beta1, params.beta2
    eps = settings.epsilon
    T = settings.t_final
    gabs = max(abs(g1), abs(g2))

    y0 = np.zeros(3, dtype=complex)
    if direction == "forward":
        t0, t1 = eps, T
        y0[internal_level] = 1.0
        if eps > 0.0:
            # analytic start correction for the (0, eps) leg
            if internal_level == 0:
                y0[1] = -1j * np.conj(g1) * _eps_integral(k2, eps, -1.0)
                y0[2] = -1j * np.conj(g2) * _eps_integral(k2, eps, -1.0)
            elif internal_level == 1:
                y0[0] = -1j * g1 * _eps_integral(k2, eps, +1.0)
            else:
                y0[0] = -1j * g2 * _eps_integral(k2, eps, +1.0)
    elif direction == "reversed":
        t0, t1 = -T, -eps
        y0[internal_level] = 1.0
        # scattering state from tau -> -infinity: one-term boundary correction
        terms = _tail_terms(k2, g1, g2, b1, b2, -T)
        if internal_level == 0:
            for j, (g, e, rate) in enumerate(terms):
                y0[1 + j] = np.conj(g) * e.conjugate() / rate
        else:
            g, e, rate = terms[internal_level - 1]
            y0[0] = -g * e / rate
    else:
        raise DomainError(f"direction must be 'forward' or 'reversed', got {direction!r}")

    y, steps = _raw_integrate(k2, g1, g2, b1, b2, t0, t1, y0, settings)
    norm_drift = abs(float(np.sum(np.abs(y) ** 2)) - float(np.sum(np.abs(y0) ** 2)))
    if norm_drift > 1e-6:
        raise IntegrationFailure("norm drift exceeded 1e-6",
                                 norm_drift=norm_drift, steps=steps)

    conv_err = 0.0
    if direction == "forward":
        terms = _tail_terms(k2, g1, g2, b1, b2, T)
        tail = np.zeros(3, dtype=complex)
        for j, (g, e, rate) in enumerate(terms):
            tail[1 + j] = -np.conj(g) * e.conjugate() * y[0] / rate
            tail[0] += g * e * y[1 + j] / rate
        conv_err += 2.0 * float(np.sum(np.abs(tail)))
        if settings.tail_correction:
            y = y + tail
    else:
        if eps > 0.0:
            # remaining (-eps, 0) leg, first order in g
            il = _eps_integral(k2, eps, -1.0)
            iu = _eps_integral(k2, eps, +1.0)
            corr = np.zeros(3, dtype=complex)
            corr[1] = -1j * np.conj(g1) * y[0] * il
            corr[2] = -1j * np.conj(g2) * y[0] * il
            corr[0] = -1j * (g1 * y[1] + g2 * y[2]) * iu
            conv_err += 2.0 * float(np.sum(np.abs(corr)))
            y = y + corr

    if direction == "forward" and eps > 0.0:
        conv_err += 2.0 * gabs * eps   # start-leg residual beyond first order
    if direction == "reversed":
        # the -T truncation is first-order corrected in y0; what remains is
        # quadratic in the boundary terms
        terms = _tail_terms(k2, g1, g2, b1, b2, -T)
        conv_err += 2.0 * sum(abs(g) / abs(rate) for (g, _, rate) in terms) ** 2

    # the exact tail is unitary; the quadratic remainder of the one-term
    # correction is spurious, so renormalize and fold the shift into conv_err
    nrm = float(np.linalg.norm(y))
    conv_err += abs(nrm * nrm - 1.0)
    y = y / nrm
    conv_err = min(1.0, conv_err + norm_drift)

    pops = np.abs(y) ** 2
    return pops, conv_err, norm_drift, steps, y


def propagate(params: ModelParams, initial_level: int,
              direction: str = "forward",
              settings: IntegrationSettings | None = None) -> PropagationResult:
    """Propagate a single scattering run and return converged populations.

    ``forward`` integrates from tau -> 0+ out to tau -> +infinity starting in
    ``initial_level``; ``reversed`` integrates from tau -> -infinity up to
    tau -> 0-, realizing the time-reflected problem whose probability matrix
    is the transpose of the forward one.  Levels refer to the caller's
    labeling of ``params``.
    """
    if initial_level not in (0, 1, 2):
        raise DomainError("initial_level must be 0, 1 or 2")
    if settings is None:
        settings = IntegrationSettings.for_params(params)
    internal = params.to_internal_level(initial_level)
    pops, conv_err, drift, steps, y = _propagate_internal(
        params, params.g1, params.g2, internal, direction, settings)
    perm = list(params.permutation)
    return PropagationResult(
        populations=pops[perm],
        conv_err=conv_err,
        norm_drift=drift,
        steps_used=steps,
        amplitudes=y[perm],
    )


def propagate_interval(params: ModelParams, state: StateVector,
                       tau_start: float, tau_end: float,
                       settings: IntegrationSettings | None = None) -> StateVector:
    """Propagate given interaction-picture amplitudes over [tau_start, tau_end].

    Plumbing for cross-checks against independently constructed solutions
    (e.g. contour-integral amplitudes); no start/tail corrections applied.
    """
    if settings is None:
        settings = IntegrationSettings.for_params(params)
    if tau_start >= tau_end:
        raise DomainError("need tau_start < tau_end")
    perm = list(params.permutation)  # an involution, so it maps both ways
    y0 = state.as_array()[perm]
    y, _ = _raw_integrate(params.k2, params.g1, params.g2,
                          params.beta1, params.beta2,
                          tau_start, tau_end, y0, settings)
    return StateVector.from_array(y[perm])


def numeric_transition_matrix(params: ModelParams,
                              settings: IntegrationSettings | None = None,
                              direction: str = "forward",
                              ) -> tuple[TransitionMatrix, float]:
    """Oracle transition matrix: one propagation per initial level.

    Row i holds the final populations starting from level i.  Row sums are
    asserted to 1 within 3x the norm-drift tolerance.
    """
    if settings is None:
        settings = IntegrationSettings.for_params(params)
    p = np.empty((3, 3))
    max_err = 0.0
    for lev in range(3):
        res = propagate(params, lev, direction, settings)
        p[lev] = res.populations
        max_err = max(max_err, res.conv_err)
        if abs(res.populations.sum() - 1.0) > 3e-6:
            raise IntegrationFailure("population row sum deviates from 1",
                                     level=lev, row_sum=float(res.populations.sum()))
    tm = TransitionMatrix(p=p, case=classify(params),
                          tol=max(max_err, 1e-6),
                          extended_domain=params.k2 < 0)
    return tm, max_err


def _unit_phase(phi: float) -> complex:
    """e^{i phi} with exact values at multiples of pi/2.

    cmath.exp(1j*pi) carries a ~1e-16 spurious imaginary part that would
    otherwise masquerade as a gauge residual after a few 1e5 steps.
    """
    k = phi / (0.5 * math.pi)
    if k == round(k):
        return (1.0, 1.0j, -1.0, -1.0j)[int(round(k)) % 4]
    return cmath.exp(1j * phi)


def gauge_check(params: ModelParams, phase1: float, phase2: float,
                settings: IntegrationSettings | None = None) -> float:
    """Propagate with complex couplings g_j e^{i phase_j}, no gauge reduction.

    Returns the maximum entrywise deviation of the resulting probability
    matrix from the magnitude-only oracle matrix.  Phases are a pure gauge,
    so the residual is integrator noise.
    """
    if settings is None:
        settings = IntegrationSettings.for_params(params)
    g1c = params.g1 * _unit_phase(phase1)
    g2c = params.g2 * _unit_phase(phase2)
    ref, _ = numeric_transition_matrix(params, settings)
    worst = 0.0
    for lev in range(3):
        internal = params.to_internal_level(lev)
        pops, _, _, _, _ = _propagate_internal(
            params, g1c, g2c, internal, "forward", settings)
        perm = list(params.permutation)
        worst = max(worst, float(np.max(np.abs(pops[perm] - ref.p[lev]))))
    return worst
