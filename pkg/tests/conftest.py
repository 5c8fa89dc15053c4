import cmath
import math

import numpy as np
import pytest

from lzc3.lzc_core import ModelParams


def gamma_by_quadrature(z: complex) -> complex:
    """Independent gamma oracle: Int_0^inf t^{z-1} e^{-t} dt via t = e^s.

    Valid for Re(z) > 0; accuracy ~1e-13 relative.
    """
    import warnings

    from scipy.integrate import IntegrationWarning, quad

    zr = complex(z)
    assert zr.real > 0

    def f(s):
        return cmath.exp(zr * s - math.exp(s))

    lo = -46.0 / zr.real
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(f, lo, 9.0, complex_func=True,
                      epsabs=1e-15, epsrel=1e-13, limit=400)
    return val


def draw_params(rng, k2_range=(0.0, 2.0), g_range=(1e-3, 1.5),
                beta_mag=(0.1, 1.0), min_gap=0.05, case=None) -> ModelParams:
    """Random model parameters from the documented verification ranges."""
    while True:
        k2 = rng.uniform(*k2_range)
        g1 = rng.uniform(*g_range)
        g2 = rng.uniform(*g_range)
        if case == "both_positive":
            signs = (1.0, 1.0)
        elif case == "both_negative":
            signs = (-1.0, -1.0)
        elif case == "mixed":
            signs = (-1.0, 1.0)
        else:
            signs = (rng.choice([-1.0, 1.0]), rng.choice([-1.0, 1.0]))
        b1 = rng.uniform(*beta_mag) * signs[0]
        b2 = rng.uniform(*beta_mag) * signs[1]
        if abs(b1 - b2) < min_gap:
            continue
        b1, b2 = min(b1, b2), max(b1, b2)
        return ModelParams(k2=k2, g1=g1, g2=g2, beta1=b1, beta2=b2)


FIG3A = dict(k2=0.1, g1=1.0, g2=0.7, beta1=0.9, beta2=1.0)
FIG3D = dict(k2=0.5, g1=0.5, g2=0.3, beta1=-0.15, beta2=0.3)
FIG3G = dict(k2=0.3, g1=1.0, g2=1.3, beta1=-0.3, beta2=-0.2)


@pytest.fixture
def fig3a():
    return ModelParams(**FIG3A)


@pytest.fixture
def fig3d():
    return ModelParams(**FIG3D)


@pytest.fixture
def fig3g():
    return ModelParams(**FIG3G)


def interaction_picture(amplitudes: np.ndarray, params: ModelParams,
                        t: float) -> np.ndarray:
    """Map transformed-time contour amplitudes (b0, b1, b2) at t = tau^2/2
    to the interaction-picture state used by the propagator."""
    tau = math.sqrt(2.0 * t)
    a0 = tau * amplitudes[0] * cmath.exp(1j * params.k2 * math.log(tau))
    return np.array([a0,
                     amplitudes[1] * cmath.exp(1j * params.beta1 * t),
                     amplitudes[2] * cmath.exp(1j * params.beta2 * t)])
