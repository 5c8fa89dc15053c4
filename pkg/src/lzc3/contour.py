"""Direct quadrature of the contour-integral solution of the model.

The amplitude equations (after a(tau) = tau b0(t), t = tau^2/2) are solved by

    b0(t) =    Q Int_A e^{-iut} (-u)^alpha (-u+beta1)^{xi1}   (-u+beta2)^{xi2}   du
    b1(t) = -Q g1 Int_A e^{-iut} (-u)^alpha (-u+beta1)^{xi1-1} (-u+beta2)^{xi2}   du
    b2(t) = -Q g2 Int_A e^{-iut} (-u)^alpha (-u+beta1)^{xi1}   (-u+beta2)^{xi2-1} du

with alpha = -1/2 + i(k^2/2 - g1^2/(2 beta1) - g2^2/(2 beta2)), xi_j =
i g_j^2/(2 beta_j), every power cut vertically downward from its branch point
(0, beta1, beta2), and A any contour on which the integrand dies off.  The
closed contour gamma_j hugs the j-th cut counterclockwise; this module
evaluates those integrals numerically:

* along the cut the two sides differ by the exact jump factor
  e^{-2 pi i nu} - 1 of the local exponent nu, so the legs collapse to a
  single damped integral down the cut;
* the b_j component on its own contour has Re(nu) = -1 at the tip, where the
  jump integral alone is log-oscillatory divergent, so a full circle of
  radius rho around the branch point is kept explicitly.  The combination is
  rho-independent (Cauchy), which the tests assert.

Also provided: the real-axis reduction J of the gamma_0 integral (used by
the |I|^2 identity against the closed-form P10) and the normalization |Q|^2,
both stated for the all-positive-slopes case.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import DomainError, NumericalError
from .lzc_core import ModelParams, SlopeCase, classify, h_factor, shorthands

__all__ = [
    "ContourIntegrand",
    "AmplitudeTriple",
    "exponents",
    "real_axis_integral",
    "normalization_q2",
    "i_squared_identity",
    "contour_amplitudes",
]

_HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class ContourIntegrand:
    """Exponents and slopes defining one branch-cut integrand.

    ``shift1``/``shift2`` (each 0 or -1) select which linear factor carries
    the extra -1 exponent, i.e. which amplitude component is integrated.
    """

    alpha: complex
    xi1: complex
    xi2: complex
    beta1: float
    beta2: float
    shift1: int = 0
    shift2: int = 0

    def __post_init__(self):
        if self.alpha.real != -0.5:
            raise DomainError(f"Re(alpha) must be exactly -1/2, got {self.alpha}")
        if abs(self.xi1.real) > 1e-15 or abs(self.xi2.real) > 1e-15:
            raise DomainError("xi1, xi2 must be purely imaginary")
        if self.shift1 not in (0, -1) or self.shift2 not in (0, -1):
            raise DomainError("shifts must be 0 or -1")


@dataclass(frozen=True)
class AmplitudeTriple:
    """Unnormalized contour amplitudes (b0, b1, b2) at transformed time t."""

    b0: complex
    b1: complex
    b2: complex
    t: float

    def as_array(self) -> np.ndarray:
        return np.array([self.b0, self.b1, self.b2], dtype=complex)


def exponents(params: ModelParams) -> tuple[complex, complex, complex]:
    """The branch-point exponents (alpha, xi1, xi2) of the contour solution."""
    r1 = 0.5 * params.g1 ** 2 / params.beta1
    r2 = 0.5 * params.g2 ** 2 / params.beta2
    alpha = -0.5 + 1j * (0.5 * params.k2 - r1 - r2)
    return alpha, 1j * r1, 1j * r2


def _quad_c(f, a, b, limit=600):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(f, a, b, complex_func=True,
                        epsabs=1e-13, epsrel=1e-11, limit=limit)
    return val, abs(err)


def real_axis_integral(integrand: ContourIntegrand) -> complex:
    """J = Int_0^inf x^alpha (x - i beta1)^{mu1} (x - i beta2)^{mu2} dx.

    mu_j = xi_j + shift_j, all powers principal.  This is the real-axis form
    the gamma_0 contour reduces to after u = -iz.  Needs
    Re(alpha + mu1 + mu2) < -1, i.e. at least one -1 shift.
    """
    mu1 = integrand.xi1 + integrand.shift1
    mu2 = integrand.xi2 + integrand.shift2
    al = integrand.alpha
    if (al + mu1 + mu2).real >= -1.0:
        raise DomainError("integral diverges at infinity: need "
                          "Re(alpha + mu1 + mu2) < -1")
    ib1 = 1j * integrand.beta1
    ib2 = 1j * integrand.beta2
    ap1 = al + 1.0
    decay_hi = -(al + mu1 + mu2 + 1.0).real  # >= 1/2

    def f(s):
        x = math.exp(s)
        return cmath.exp(ap1 * s + mu1 * cmath.log(x - ib1)
                         + mu2 * cmath.log(x - ib2))

    lo = -80.0 / ap1.real          # e^{Re(ap1) s} below 1e-34 at the cutoff
    hi = 80.0 / decay_hi
    scale = max(abs(integrand.beta1), abs(integrand.beta2), 1.0)
    mid = math.log(scale)
    v1, e1 = _quad_c(f, lo, mid)
    v2, e2 = _quad_c(f, mid, hi)
    val = v1 + v2
    if e1 + e2 > 1e-8 * max(abs(val), 1e-30):
        raise NumericalError("real-axis contour integral failed to converge",
                             value=val, err=e1 + e2)
    return val


def normalization_q2(params: ModelParams) -> float:
    """|Q|^2 = (4 pi [e^{pi(k^2 - q1 - q2)} + 1])^{-1} (all-positive slopes)."""
    if classify(params) is not SlopeCase.BOTH_POSITIVE:
        raise DomainError("|Q|^2 is only stated for beta2 > beta1 > 0")
    sh = shorthands(params)
    return 1.0 / (4.0 * math.pi * (math.exp(math.pi * (params.k2 - sh.q1 - sh.q2)) + 1.0))


def i_squared_identity(params: ModelParams) -> tuple[float, float]:
    """Both sides of the |I|^2 identity behind P10 (all-positive slopes).

    lhs: |I|^2 with I = -(i)^{alpha+xi1+xi2} (1 - e^{-2 pi i alpha}) J
    evaluated by quadrature; rhs: the beta-function-times-hypergeometric
    closed form 4 pi (1 - p1 p2) H10 [e^{pi(k^2-q1-q2)} + 1] /
    (beta2 (q1+q2) (1+kappa)).  Returned as (lhs, rhs) for residual
    reporting.
    """
    if classify(params) is not SlopeCase.BOTH_POSITIVE:
        raise DomainError("the |I|^2 identity is stated for beta2 > beta1 > 0")
    al, xi1, xi2 = exponents(params)
    j = real_axis_integral(ContourIntegrand(
        alpha=al, xi1=xi1, xi2=xi2,
        beta1=params.beta1, beta2=params.beta2, shift1=-1, shift2=0))
    pref = -cmath.exp(1j * _HALF_PI * (al + xi1 + xi2)) \
        * (1.0 - cmath.exp(-2j * math.pi * al))
    lhs = abs(pref * j) ** 2

    sh = shorthands(params)
    h10 = h_factor("H10", params)
    rhs = (4.0 * math.pi * (1.0 - sh.p1 * sh.p2) * h10
           * (math.exp(math.pi * (params.k2 - sh.q1 - sh.q2)) + 1.0)
           / (params.beta2 * (sh.q1 + sh.q2) * (1.0 + sh.kappa)))
    return lhs, rhs


def _pow_cut(w: complex, nu: complex) -> complex:
    """w^nu with arg(w) in (-3 pi/2, pi/2]: the cut runs down the +i axis."""
    th = cmath.phase(w)
    if th > _HALF_PI:
        th -= 2.0 * math.pi
    return cmath.exp(nu * (math.log(abs(w)) + 1j * th))


def contour_amplitudes(params: ModelParams, contour: int, t: float,
                       rho: float | None = None) -> AmplitudeTriple:
    """Evaluate (b0, b1, b2) at time t over the cut-hugging contour gamma_j.

    ``contour`` is the index j in {0, 1, 2} of the branch point
    {0, beta1, beta2} whose cut the contour encircles counterclockwise.
    Amplitudes are unnormalized (Q = 1).  ``rho`` (tip-circle radius) is
    exposed for the rho-independence test only.
    """
    if contour not in (0, 1, 2):
        raise DomainError("contour must be 0, 1 or 2")
    if not t > 0.0:
        raise DomainError("need t > 0 for the e^{-iut} damping")
    al, xi1, xi2 = exponents(params)
    u_pts = (0.0, params.beta1, params.beta2)
    uc = u_pts[contour]
    others = [m for m in range(3) if m != contour]
    gap = min(abs(u_pts[m] - uc) for m in others)
    if rho is None:
        rho = min(0.25 * gap, 0.5 / t)
    if not 0.0 < rho <= 0.5 * gap:
        raise DomainError("tip radius must satisfy 0 < rho <= gap/2")
    depth = max(40.0 / t, 2.0 * rho)   # e^{-st} below 1e-17 past the legs
    coeffs = (1.0, -params.g1, -params.g2)

    values = []
    for n in range(3):
        nus = [al,
               xi1 + (-1.0 if n == 1 else 0.0),
               xi2 + (-1.0 if n == 2 else 0.0)]
        nu_c = nus[contour]
        jump = cmath.exp(-2j * math.pi * nu_c) - 1.0
        phase0 = cmath.exp(-1j * uc * t)

        def legs(sig, nu_c=nu_c, nus=nus):
            s = math.exp(sig)
            acc = cmath.exp(-s * t) * _pow_cut(1j * s, nu_c) * s  # ds = s dsig
            for m in others:
                acc *= _pow_cut(u_pts[m] - uc + 1j * s, nus[m])
            return acc

        def arc(th, nu_c=nu_c, nus=nus):
            u = uc + rho * cmath.exp(1j * th)
            acc = cmath.exp(-1j * u * t) * 1j * rho * cmath.exp(1j * th)
            # continuous branch along the circle: arg(uc - u) = th - pi
            acc *= cmath.exp(nu_c * (math.log(rho) + 1j * (th - math.pi)))
            for m in others:
                acc *= _pow_cut(u_pts[m] - u, nus[m])
            return acc

        v_leg, e_leg = _quad_c(legs, math.log(rho), math.log(depth))
        v_arc, e_arc = _quad_c(arc, -_HALF_PI, 3.0 * _HALF_PI)
        total = 1j * jump * phase0 * v_leg + v_arc
        if e_leg + e_arc > 1e-7 * abs(total) + 5e-13:
            raise NumericalError("contour quadrature failed to converge",
                                 component=n, contour=contour, t=t,
                                 value=total, err=e_leg + e_arc)
        values.append(coeffs[n] * total)

    return AmplitudeTriple(b0=values[0], b1=values[1], b2=values[2], t=t)
