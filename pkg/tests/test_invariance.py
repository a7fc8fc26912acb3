import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logigrowth.errors import DegenerateError, DomainError, PoleError, PreconditionError
from logigrowth.growth import GrowthModel
from logigrowth.invariance import (Generator, WageShareFrame, characteristic_reconstruct,
                                   distribution_integrability, exponential_projective_flow,
                                   fundamental_invariants, holotheticity_residual,
                                   isoquant_points, isoquant_preservation, kink_invariant_residual,
                                   lie_bracket, linear_output_rate, logistic_output_rate,
                                   logistic_projective_flow, modified_wage_share,
                                   transported_slope_fd, wage_share)
from logigrowth.production import CobbDouglas, LogisticBoth, WageShareCompatible

RNG = np.random.default_rng(11)
SAMPLES = np.column_stack([RNG.uniform(5, 108, 100), RNG.uniform(5, 110, 100)])


# --- holotheticity --------------------------------------------------------

def test_f5_holothetic_under_logistic_growth():
    f = LogisticBoth.from_rates(2, 1, 1.5, 120, 113, 115, 1.18)
    rep = holotheticity_residual(Generator.logistic(2, 1, 113, 115), f,
                                 logistic_output_rate(1.5, 120), SAMPLES)
    assert rep.used == 100
    assert rep.max_residual <= 1e-6


def test_cobb_douglas_euler_identity():
    rep = holotheticity_residual(Generator.exponential(1, 1), CobbDouglas(2.0, 0.3, 0.7),
                                 linear_output_rate(1.0), SAMPLES)
    assert rep.max_residual <= 1e-8


def test_f9_holothetic_under_induced_action():
    f = WageShareCompatible(0.5, 1.0)
    lam = 2.0
    gamma = lam * f.C3
    S = np.column_stack([RNG.uniform(1, 10, 100), RNG.uniform(1, 10, 100)])
    rep = holotheticity_residual(Generator.wage_share_action(lam), f,
                                 lambda y, K, L: gamma * y * (1 - y / K), S)
    assert rep.max_residual <= 1e-6


def test_wrong_output_rate_is_detected():
    f = LogisticBoth.from_rates(2, 1, 1.5, 120, 113, 115, 1.18)
    rep = holotheticity_residual(Generator.logistic(2, 1, 113, 115), f,
                                 logistic_output_rate(1.2, 120), SAMPLES)
    assert rep.max_residual > 1.0


def test_kink_samples_skipped():
    f = LogisticBoth.from_rates(2, 1, 1.5, 120, 113, 115, 1.18)
    rep = holotheticity_residual(Generator.logistic(2, 1, 113, 115), f,
                                 logistic_output_rate(1.5, 120), [(113.0, 50.0), (50.0, 50.0)])
    assert rep.used == 1 and rep.skipped == [(113.0, 50.0)]


# --- isoquants ------------------------------------------------------------

def test_cobb_douglas_isoquants_map_to_isoquants():
    f = CobbDouglas(1.0, 0.3, 0.7)
    K = np.array([1.0, 3.0, 9.0])
    rep = isoquant_preservation(GrowthModel.exponential(0.2, 0.2), f,
                                (K, isoquant_points(f, 4.0, K)), 1.7)
    assert rep.preserved


def test_zero_time_keeps_level():
    f = CobbDouglas(1.0, 0.3, 0.7)
    K = np.array([1.0, 3.0])
    rep = isoquant_preservation(GrowthModel.exponential(0.1, 0.5), f,
                                (K, isoquant_points(f, 2.0, K)), 0.0)
    assert rep.image_level == pytest.approx(rep.input_level, rel=1e-14)


def test_f5_isoquants_preserved_by_logistic_growth():
    f = LogisticBoth.from_rates(2, 1, 1.5, 120, 113, 115, 1.18)
    K = np.linspace(20, 100, 6)
    rep = isoquant_preservation(GrowthModel.logistic(2, 1, 113, 115), f,
                                (K, isoquant_points(f, 60.0, K)), 0.4)
    assert rep.preserved and rep.image_spread <= 1e-6


def test_isoquant_precondition():
    with pytest.raises(PreconditionError):
        isoquant_preservation(GrowthModel.exponential(1, 1), CobbDouglas(1, .5, .5),
                              ([1.0, 2.0], [1.0, 1.0]), 1.0)


# --- brackets -------------------------------------------------------------

def _x3_x4(a=2.0, b=1.0, c=1.5):
    return (Generator.logistic(1, 1, 113, 115, 1, 120),
            Generator.logistic(a, b, 113, 115, c, 120))


SAMPLES3 = np.column_stack([SAMPLES, RNG.uniform(5, 115, 100)])


def test_logistic_pair_is_integrable():
    X3, X4 = _x3_x4()
    assert distribution_integrability(X3, X4, SAMPLES3) <= 1e-5


def test_proportional_fields_commute():
    X3, _ = _x3_x4()
    X4 = Generator(lambda K, L: 2 * X3.xi(K, L), lambda K, L: 2 * X3.eta(K, L),
                   lambda f: 2 * X3.zeta(f))
    assert distribution_integrability(X3, X4, SAMPLES3[:10]) <= 1e-9


def test_rotation_does_not_commute():
    X3, _ = _x3_x4()
    rot = Generator(lambda K, L: -L, lambda K, L: K)
    assert distribution_integrability(X3, rot, SAMPLES3) > 1.0


def test_bracket_against_hand_derivative():
    # [K d/dK, L^2 d/dL] = 0 and [K d/dK, K^2 d/dL] = 2K^2 d/dL
    X = Generator(lambda K, L: K, lambda K, L: 0.0 * K)
    Y = Generator(lambda K, L: 0.0 * K, lambda K, L: K ** 2)
    br = lie_bracket(X, Y, (3.0, 4.0, 1.0))
    np.testing.assert_allclose(br, [0.0, 18.0, 0.0], atol=1e-6)


# --- characteristics ------------------------------------------------------

def test_tde_exponents_known_case():
    rep = characteristic_reconstruct("exponential_pair", dict(a=2, b=0.5), (3.0, 4.0, 5.0))
    assert rep.alpha == pytest.approx(1 / 3) and rep.beta == pytest.approx(2 / 3)
    assert rep.recovered_alpha == pytest.approx(1 / 3, abs=1e-9)
    assert rep.recovered_sum == pytest.approx(1.0, abs=1e-9)


def test_tde1_drift():
    rep = characteristic_reconstruct("logistic_pair", dict(a=2, b=1, c=1.5, NK=113, NL=115, Nf=120),
                                     (30.0, 40.0, 50.0), span=2.0)
    assert rep.drift <= 1e-7
    assert rep.recovered_alpha == pytest.approx(0.5, abs=1e-7)


def test_single_field_invariants():
    rep = characteristic_reconstruct("single", dict(a=2, b=1, c=1.5), (3.0, 4.0, 5.0))
    assert rep.drift <= 1e-7 and rep.alpha is None


def test_characteristics_degenerate_and_domain():
    with pytest.raises(DegenerateError):
        characteristic_reconstruct("exponential_pair", dict(a=1, b=1), (1.0, 1.0, 1.0))
    with pytest.raises(DomainError):
        characteristic_reconstruct("logistic_pair", dict(a=2, b=1, c=1.5, NK=10, NL=10, Nf=10),
                                   (11.0, 1.0, 1.0))


# --- wage shares ----------------------------------------------------------

def test_power_curve_wage_share():
    for x in (0.2, 1.0, 7.0):
        fr = WageShareFrame(x, x ** 0.6, 0.6 * x ** -0.4)
        assert wage_share(fr) == pytest.approx(0.6, rel=1e-14)


def test_flat_curve_has_zero_share():
    assert wage_share(WageShareFrame(0.5, 2.0, 0.0)) == 0.0


def test_wage_share_f5_slice():
    f = LogisticBoth(120, 113, 115, 0.4, 0.6, 0.5)
    K = 60.0

    def y(x):
        return f(K, x * K) / K

    x, h = 1.2, 1e-6
    yx = (y(x + h) - y(x - h)) / (2 * h)
    fd_share = x * yx / y(x)
    L = x * K
    mpl = (f(K, L + 1e-6) - f(K, L - 1e-6)) / 2e-6
    assert fd_share == pytest.approx(L * mpl / f(K, L), rel=1e-6)


def test_modified_share_arithmetic():
    fr = WageShareFrame(0.5, 0.75, 0.6 * 0.75 / 0.5)
    assert wage_share(fr) == pytest.approx(0.6)
    assert modified_wage_share(fr) == pytest.approx(1.2)
    assert modified_wage_share(WageShareFrame(1.0, 0.5, 3.0)) == 0.0
    with pytest.raises(PoleError):
        modified_wage_share(WageShareFrame(0.5, 1.0, 3.0))
    with pytest.raises(DomainError):
        WageShareFrame(0.5, 0.0, 1.0)


def test_self_similar_exponential_invariant():
    g, lm = 0.9, 0.3
    for x in (0.5, 2.0, 9.0):
        fr = WageShareFrame(x, x ** (g / lm), (g / lm) * x ** (g / lm - 1), g, lm)
        assert fundamental_invariants("exponential", fr)[0] == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("x,y", [(0.3, 0.6), (0.7, 0.2), (2.0, 0.4)])
def test_invariant_product_gives_modified_share(x, y):
    g, lm = 1.3, 0.5
    fr = WageShareFrame(x, y, 0.8, g, lm)
    I1, I2 = fundamental_invariants("logistic", fr)
    assert I1 * I2 / (2 * g) ** 2 == pytest.approx(modified_wage_share(fr), rel=1e-12)


def test_invariant_product_sign_flips_above_one():
    fr = WageShareFrame(0.3, 1.5, 0.8, 1.3, 0.5)
    I1, I2 = fundamental_invariants("logistic", fr)
    assert I1 * I2 / (2 * 1.3) ** 2 == pytest.approx(-modified_wage_share(fr), rel=1e-12)


def test_logistic_invariants_poles():
    with pytest.raises(PoleError):
        fundamental_invariants("logistic", WageShareFrame(1.0, 0.5, 1.0, 1.0, 1.0))


# --- transport ------------------------------------------------------------

frames = st.builds(WageShareFrame, st.floats(0.05, 0.95), st.floats(0.05, 0.95),
                   st.floats(0.1, 3.0), st.floats(0.1, 2.0), st.floats(0.1, 2.0))


@settings(max_examples=200, deadline=None)
@given(frames, st.floats(-2.0, 2.0))
def test_logistic_transport_keeps_invariants(fr, t):
    img = logistic_projective_flow(fr, t)
    assert modified_wage_share(img) == pytest.approx(modified_wage_share(fr), rel=1e-7)
    for a, b in zip(fundamental_invariants("logistic", img), fundamental_invariants("logistic", fr)):
        assert a == pytest.approx(b, rel=1e-7)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, 20), st.floats(0.05, 20), st.floats(-3, 3), st.floats(0.1, 2),
       st.floats(0.1, 2), st.floats(-3, 3))
def test_exponential_transport_keeps_wage_share(x, y, yx, g, lm, t):
    fr = WageShareFrame(x, y, yx, g, lm)
    img = exponential_projective_flow(fr, t)
    assert wage_share(img) == pytest.approx(wage_share(fr), rel=1e-8, abs=1e-12)
    for a, b in zip(fundamental_invariants("exponential", img), fundamental_invariants("exponential", fr)):
        assert a == pytest.approx(b, rel=1e-7, abs=1e-12)


def test_chain_rule_slope_matches_differences():
    def curve(u):
        return 0.2 + 0.5 * u ** 1.5

    x, t, g, lm = 0.4, 0.8, 1.3, 0.5
    fr = WageShareFrame(x, curve(x), 0.75 * x ** 0.5, g, lm)
    img = logistic_projective_flow(fr, t)
    assert img.y_x == pytest.approx(transported_slope_fd(curve, x, t, g, lm), rel=1e-6)
    img = exponential_projective_flow(fr, t)
    assert img.y_x == pytest.approx(transported_slope_fd(curve, x, t, g, lm, "exponential"), rel=1e-6)


def test_classical_share_drifts_under_logistic_growth():
    fr = WageShareFrame(0.3, 0.6, 0.8, 1.3, 0.5)
    img = logistic_projective_flow(fr, 1.0)
    assert abs(wage_share(img) - wage_share(fr)) > 1e-3


def test_curve_solving_invariant_relation_has_constant_share():
    # y(x) with constant modified share: y = 1/(1 + c4 ((1-x)/x)^k) on (0, 1)
    k, c4 = 0.6, 1.5

    def curve(x):
        return 1 / (1 + c4 * ((1 - x) / x) ** k)

    def slope(x):
        y = curve(x)
        return k * y * (1 - y) / (x * (1 - x))

    vals = []
    for x in np.linspace(0.1, 0.9, 17):
        fr = WageShareFrame(x, curve(x), slope(x), 0.9, 1.5)
        for t in (0.0, 0.5, 1.5):
            vals.append(modified_wage_share(logistic_projective_flow(fr, t)))
    assert np.var(vals) <= 1e-8
    assert np.mean(vals) == pytest.approx(k)


# --- invariant of the one-input construction ------------------------------

def test_kink_invariant_annihilated_only_at_rate_ratio():
    S = SAMPLES[:30]
    assert kink_invariant_residual(2.0, 1.0, 113, 115, 2.0, S) <= 1e-6
    assert kink_invariant_residual(2.0, 1.0, 113, 115, 1.5, S) > 0.1
