import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lzc3.errors import DegenerateSlopeError, DomainError
from lzc3.lzc_core import (
    MIXED_CASE_CUT_SIDE,
    ModelParams,
    SlopeCase,
    classify,
    h_factor,
    reflected_params,
    shorthands,
    transition_matrix,
)
from lzc3.special_functions import CutSide, Hyp2F1Input, hyp2f1_euler_quadrature

from conftest import FIG3A, draw_params


# ---------------------------------------------------------------------------
# parameters and shorthands
# ---------------------------------------------------------------------------

def test_params_validation():
    with pytest.raises(DegenerateSlopeError):
        ModelParams(k2=0.1, g1=1.0, g2=1.0, beta1=0.5, beta2=0.5)
    with pytest.raises(DegenerateSlopeError):
        ModelParams(k2=0.1, g1=1.0, g2=1.0, beta1=0.0, beta2=0.5)
    with pytest.raises(DomainError):
        ModelParams(k2=0.1, g1=-1.0, g2=1.0, beta1=0.3, beta2=0.5)
    with pytest.raises(DomainError):
        ModelParams(k2=float("nan"), g1=1.0, g2=1.0, beta1=0.3, beta2=0.5)


def test_params_normalization_swaps_labels():
    p = ModelParams(k2=0.2, g1=0.3, g2=0.9, beta1=1.0, beta2=0.5)
    assert p.swapped
    assert p.beta1 == 0.5 and p.beta2 == 1.0
    assert p.g1 == 0.9 and p.g2 == 0.3
    assert p.permutation == (0, 2, 1)
    # matrix comes back in the caller's labeling
    q = ModelParams(k2=0.2, g1=0.9, g2=0.3, beta1=0.5, beta2=1.0)
    swap = [0, 2, 1]
    assert np.allclose(transition_matrix(p).p,
                       transition_matrix(q).p[np.ix_(swap, swap)], atol=1e-14)


def test_shorthands_trivial():
    p = ModelParams(k2=0.0, g1=0.0, g2=0.0, beta1=0.4, beta2=1.0)
    sh = shorthands(p)
    assert sh.kappa == 1.0 and sh.p1 == 1.0 and sh.p2 == 1.0
    assert sh.q1 == 0.0 and sh.q2 == 0.0 and sh.C1 == 0.0 and sh.C2 == 0.0
    p1 = ModelParams(k2=1.0, g1=0.0, g2=0.0, beta1=0.4, beta2=1.0)
    assert shorthands(p1).kappa == pytest.approx(math.exp(-math.pi), rel=1e-15)


def test_shorthands_fig3a():
    sh = shorthands(ModelParams(**FIG3A))
    assert sh.kappa == pytest.approx(0.730403, abs=5e-7)
    assert sh.p1 == pytest.approx(0.030480, abs=5e-6)
    assert sh.p2 == pytest.approx(0.214513, abs=5e-6)
    assert sh.q1 == pytest.approx(1.111111, abs=5e-7)
    assert sh.q2 == pytest.approx(0.49, abs=1e-12)


@pytest.mark.parametrize("b1,b2,case", [
    (0.9, 1.0, SlopeCase.BOTH_POSITIVE),
    (-0.15, 0.3, SlopeCase.MIXED),
    (-0.3, -0.2, SlopeCase.BOTH_NEGATIVE),
])
def test_classify(b1, b2, case):
    assert classify(ModelParams(k2=0.1, g1=0.5, g2=0.5, beta1=b1, beta2=b2)) is case


# ---------------------------------------------------------------------------
# H factors
# ---------------------------------------------------------------------------

def test_h_factor_binomial_reduction():
    # g1 = g2 = 0 collapses H10 to |2F1(1, b; 1; z)|^2 = |(1-z)^{-b}|^2
    p = ModelParams(k2=0.8, g1=0.0, g2=0.0, beta1=0.4, beta2=1.0)
    z = (p.beta2 - p.beta1) / p.beta2
    b = 0.5 - 0.5j * p.k2
    expected = abs((1.0 - z) ** (-b)) ** 2
    assert h_factor("H10", p) == pytest.approx(expected, rel=1e-12)


def test_h_factor_euler_quadrature_oracle():
    # H12 at Fig 3(a): engine vs direct quadrature of the same tuple
    p = ModelParams(**FIG3A)
    r1, r2 = 0.5 * p.g1 ** 2 / p.beta1, 0.5 * p.g2 ** 2 / p.beta2
    a = 0.5 - 1j * (0.5 * p.k2 - r1 - r2)
    b = 0.5 - 0.5j * p.k2
    c = 1.5 - 1j * (0.5 * p.k2 - r2)
    z = p.beta1 / (p.beta1 - p.beta2)
    quad = hyp2f1_euler_quadrature(Hyp2F1Input(a=a, b=b, c=c, z=z))
    assert h_factor("H12", p) == pytest.approx(abs(quad.value) ** 2, rel=1e-9)


def test_h_factor_unknown_name():
    with pytest.raises(ValueError):
        h_factor("H01", ModelParams(**FIG3A))


# ---------------------------------------------------------------------------
# transition matrix
# ---------------------------------------------------------------------------

def test_zero_coupling_identity():
    p = ModelParams(k2=0.7, g1=0.0, g2=0.0, beta1=-0.4, beta2=1.0)
    assert np.array_equal(transition_matrix(p).p, np.eye(3))


def test_fig3a_column_zero():
    tm = transition_matrix(ModelParams(**FIG3A))
    assert tm.case is SlopeCase.BOTH_POSITIVE
    assert tm.p[0, 0] == pytest.approx(0.425879, abs=1e-6)
    assert tm.p[0, 1] == pytest.approx(0.120189, abs=1e-6)
    assert tm.p[0, 2] == pytest.approx(0.453933, abs=1e-6)
    assert tm.p[0].sum() == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_double_stochasticity_and_range(seed):
    rng = np.random.default_rng(seed)
    tm = transition_matrix(draw_params(rng))
    assert tm.stochasticity_residual() <= 1e-6
    assert tm.range_residual() <= 1e-6


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_row0_hypergeometric_identity(seed):
    # first display row (P00, P10, P20): three independent formulas whose sum
    # is 1 only because the hypergeometric identity behind Table rows holds
    rng = np.random.default_rng(seed)
    tm = transition_matrix(draw_params(rng))
    assert abs(tm.p[:, 0].sum() - 1.0) <= 1e-6


def test_reflection_symmetry_and_involution():
    rng = np.random.default_rng(42)
    for _ in range(8):
        p = draw_params(rng)
        refl, perm = reflected_params(p)
        pm = list(perm)
        assert np.max(np.abs(transition_matrix(p).p
                             - transition_matrix(refl).p[np.ix_(pm, pm)])) <= 1e-9
        back, _ = reflected_params(refl)
        assert back == p


def test_reflection_case1_to_case3_example():
    p = ModelParams(**FIG3A)
    refl, perm = reflected_params(p)
    assert refl.k2 == -0.1
    assert (refl.beta1, refl.beta2) == (-1.0, -0.9)
    assert (refl.g1, refl.g2) == (0.7, 1.0)
    assert perm == (0, 2, 1)
    assert classify(refl) is SlopeCase.BOTH_NEGATIVE
    assert transition_matrix(refl).extended_domain


def test_negation_symmetry():
    rng = np.random.default_rng(24)
    for _ in range(8):
        p = draw_params(rng)
        neg = ModelParams(k2=-p.k2, g1=p.g1, g2=p.g2,
                          beta1=-p.beta1, beta2=-p.beta2)
        assert np.max(np.abs(transition_matrix(p).p
                             - transition_matrix(neg).p)) <= 1e-9


def test_large_k2_limit_case1():
    # kappa -> 0: column out of level 0 approaches the pure two-crossing
    # product form
    p = ModelParams(k2=20.0, g1=0.8, g2=0.6, beta1=0.5, beta2=1.0)
    sh = shorthands(p)
    tm = transition_matrix(p)
    assert tm.p[0, 0] == pytest.approx(sh.p1 * sh.p2, abs=1e-8)
    assert tm.p[0, 1] == pytest.approx(sh.p2 * (1.0 - sh.p1), abs=1e-8)
    assert tm.p[0, 2] == pytest.approx(1.0 - sh.p2, abs=1e-8)


def test_mixed_case_cut_side_constant():
    # the calibrated branch gives a doubly stochastic matrix on a mixed-slope
    # grid; the opposite side visibly breaks the row-0 identity
    assert MIXED_CASE_CUT_SIDE is CutSide.ABOVE_CUT
    rng = np.random.default_rng(9)
    for _ in range(10):
        p = draw_params(rng, case="mixed")
        good = transition_matrix(p)
        assert abs(good.p[:, 0].sum() - 1.0) <= 1e-6
        assert good.range_residual() <= 1e-6
        bad = transition_matrix(p, cut_side=CutSide.BELOW_CUT)
        assert abs(bad.p[:, 0].sum() - 1.0) > 1e-3


def test_single_zero_coupling_rows():
    # decoupled level's row and column become unit vectors by the formulas
    # themselves (no special-casing)
    p = ModelParams(k2=0.4, g1=0.0, g2=0.6, beta1=0.3, beta2=0.9)
    tm = transition_matrix(p)
    assert tm.p[1, 1] == pytest.approx(1.0, abs=1e-9)
    assert abs(tm.p[1, 0]) <= 1e-9 and abs(tm.p[1, 2]) <= 1e-9
    assert abs(tm.p[0, 1]) <= 1e-9 and abs(tm.p[2, 1]) <= 1e-9


def test_extended_domain_flag():
    p = ModelParams(k2=-0.3, g1=0.5, g2=0.5, beta1=0.2, beta2=0.8)
    tm = transition_matrix(p)
    assert tm.extended_domain
    assert tm.stochasticity_residual() <= 1e-6
    assert not transition_matrix(ModelParams(**FIG3A)).extended_domain


def test_clamped_matrix():
    tm = transition_matrix(ModelParams(**FIG3A))
    cl = tm.clamped()
    assert np.all(cl >= 0.0) and np.all(cl <= 1.0)
