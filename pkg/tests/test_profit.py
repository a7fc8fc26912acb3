import numpy as np
import pytest

from logigrowth.errors import ConvergenceError, DegenerateError, DomainError, PreconditionError
from logigrowth.production import LogisticBoth, evaluate
from logigrowth.profit import (MarketPrices, check_soc, consistency_condition, f5_derivatives,
                               grid_argmax, profit, recover_elasticities, solve_foc)
from profit_instances import lower_quadrant, upper_quadrant

FIT = LogisticBoth(120, 150, 150, 0.4063544, 0.5936456, 0.3118901)


def test_free_factors_profit_is_output():
    assert profit((1.0, 0.0, 0.0), FIT, 60.0, 80.0) == evaluate(FIT, 60.0, 80.0)


def test_profit_vanishes_without_inputs():
    pr = MarketPrices(1.0, 0.5, 0.5)
    assert abs(profit(pr, FIT, 1e-9, 1e-9)) < 1e-6


def test_profit_spot_value():
    pr = MarketPrices(2.0, 0.3, 0.4)
    y = FIT.Nf * 60 ** FIT.alpha * 80 ** FIT.beta / (
        FIT.C * 90 ** FIT.alpha * 70 ** FIT.beta + 60 ** FIT.alpha * 80 ** FIT.beta)
    assert profit(pr, FIT, 60.0, 80.0) == pytest.approx(2 * y - 0.3 * 60 - 0.4 * 80, rel=1e-12)


def test_prices_validated():
    with pytest.raises(ValueError):
        MarketPrices(1.0, 0.0, 1.0)


def test_analytic_derivatives_match_differences():
    f = LogisticBoth(120, 113, 115, 0.4, 0.7, 1.3)
    K, L, h = 40.0, 70.0, 1e-4
    _, g, H = f5_derivatives(f, K, L)

    def grad(k, l):
        return np.array([(evaluate(f, k + h, l) - evaluate(f, k - h, l)) / (2 * h),
                         (evaluate(f, k, l + h) - evaluate(f, k, l - h)) / (2 * h)])

    np.testing.assert_allclose(g, grad(K, L), rtol=1e-7)
    d = 1e-2
    Hfd = np.column_stack([(grad(K + d, L) - grad(K - d, L)) / (2 * d),
                           (grad(K, L + d) - grad(K, L - d)) / (2 * d)])
    np.testing.assert_allclose(H, Hfd, rtol=1e-4)


LOWER = lower_quadrant(6, seed=5)
UPPER = upper_quadrant(4, seed=6)


@pytest.mark.parametrize("f,pr,planted", LOWER)
def test_solver_finds_planted_maximum(f, pr, planted):
    sol = solve_foc(pr, f, (planted[0] * 1.05, planted[1] * 1.05))
    assert sol.status == "max"
    assert sol.K == pytest.approx(planted[0], rel=1e-7)
    _, g, _ = f5_derivatives(f, sol.K, sol.L)
    assert g[0] == pytest.approx(pr.p1 / pr.p0, rel=1e-7)
    assert g[1] == pytest.approx(pr.p2 / pr.p0, rel=1e-7)
    assert sol.Y == pytest.approx(evaluate(f, sol.K, sol.L), rel=1e-9)
    assert sol.multiplier == pr.p0


@pytest.mark.parametrize("f,pr,planted", LOWER[:3])
def test_grid_oracle_dominance(f, pr, planted):
    sol = solve_foc(pr, f, (planted[0] * 1.05, planted[1] * 1.05))
    gK, gL, best, dK, dL = grid_argmax(pr, f, (f.NK / 800, f.NK), (f.NL / 800, f.NL))
    assert abs(sol.K - gK) <= dK and abs(sol.L - gL) <= dL
    assert sol.profit >= best - 1e-9


@pytest.mark.parametrize("f,pr,planted", LOWER[:3])
def test_maximizer_invariant_under_price_scaling(f, pr, planted):
    start = (planted[0] * 1.05, planted[1] * 1.05)
    a = solve_foc(pr, f, start)
    b = solve_foc(pr.scaled(7.5), f, start)
    assert abs(a.K - b.K) <= 1e-8 and abs(a.L - b.L) <= 1e-8
    assert b.profit == pytest.approx(7.5 * a.profit, rel=1e-10)


@pytest.mark.parametrize("f,pr,planted", UPPER)
def test_upper_quadrant_stationary_points_are_not_maxima(f, pr, planted):
    sol = solve_foc(pr, f, (planted[0] * 0.999, planted[1] * 0.999))
    assert sol.soc.all_pass
    assert sol.status == "stationary, not max"


def test_solver_errors():
    f, pr, planted = LOWER[0]
    with pytest.raises(ConvergenceError) as exc:
        solve_foc(pr, f, (0.9 * f.NK, 0.9 * f.NL), max_iter=1)
    assert exc.value.trace
    with pytest.raises(PreconditionError):
        solve_foc(pr, f, (2 * f.NK, 1.0))


# --- second-order report --------------------------------------------------

def test_soc_at_ninety_percent_of_capacity():
    f = LogisticBoth(120, 100, 120, 0.4, 0.6, 1.0)
    rep = check_soc(f, 90.0, 108.0)
    assert rep.passed == (True, True, True, False)
    assert rep.values[3] == pytest.approx(-0.16 * 100 * 120)


def test_soc_exponent_above_one():
    rep = check_soc(LogisticBoth(120, 100, 100, 1.2, 0.5, 1.0), 80.0, 80.0)
    assert not rep.passed[0]


def test_soc_boundary_flag():
    f = LogisticBoth(120, 100, 100, 0.4, 0.5, 1.0)
    rep = check_soc(f, 50.0, 80.0)
    assert rep.boundary and not rep.k_above_half
    assert rep.values[2] == pytest.approx(100 * 60 * 0.4)
    assert rep.values[3] == pytest.approx(-100 * 60 * 0.4)
    assert check_soc(f, 50.0, 80.0) == rep


# --- consistency ----------------------------------------------------------

def test_consistency_condition():
    assert consistency_condition(0.3, 0.5, 1.0).consistent
    assert not consistency_condition(0.5, 0.5, 1.0).consistent
    assert consistency_condition(0.6, 0.7, -0.5).consistent
    assert not consistency_condition(0.3, 0.3, -0.5).consistent
    with pytest.raises(DegenerateError):
        consistency_condition(0.3, 0.3, 0.0)


# --- elasticity recovery --------------------------------------------------

def test_midpoint_simplification():
    pr = MarketPrices(2.0, 0.6, 0.9)
    rec = recover_elasticities(pr, 60.0, 30.0, 60.0, 120.0, 120.0, 100.0, 1.0)
    assert rec.alpha == pytest.approx(0.6 / 2.0)
    printed = recover_elasticities(pr, 60.0, 30.0, 60.0, 120.0, 120.0, 100.0, 1.0, printed=True)
    assert printed.alpha == pytest.approx(0.9 / 2.0)


@pytest.mark.parametrize("f,pr,planted", LOWER)
def test_round_trip(f, pr, planted):
    sol = solve_foc(pr, f, (planted[0] * 1.05, planted[1] * 1.05))
    rec = recover_elasticities(pr, sol.K, sol.L, sol.Y, f.Nf, f.NK, f.NL, f.C)
    assert rec.alpha == pytest.approx(f.alpha, abs=1e-6)
    assert rec.alpha + rec.beta == pytest.approx(f.alpha + f.beta, abs=1e-6)
    printed = recover_elasticities(pr, sol.K, sol.L, sol.Y, f.Nf, f.NK, f.NL, f.C, printed=True)
    assert printed.alpha == pytest.approx(f.alpha * pr.p2 / pr.p1, rel=1e-6)


def test_recovery_domain():
    pr = MarketPrices(1, 1, 1)
    with pytest.raises(DomainError):
        recover_elasticities(pr, 60.0, 30.0, 130.0, 120.0, 120.0, 100.0, 1.0)
    with pytest.raises(DomainError):
        recover_elasticities(pr, 60.0, 30.0, 60.0, 120.0, 120.0, 100.0, -1.0)
