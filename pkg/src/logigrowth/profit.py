"""Profit maximization under perfect competition with f5 as technology.

Profit is ``p0 f5(K, L) - p1 K - p2 L``.  With output eliminated through the
production constraint (its multiplier equals the output price) the problem
reduces to the two stationarity equations ``p0 f_K = p1``, ``p0 f_L = p2``,
solved here by damped Newton on analytic derivatives inside
D' = (0, NK) x (0, NL), where the absolute values resolve with positive sign.

Inside D' the function is a sigmoid of
``s = alpha logit(K/NK) + beta logit(L/NL)``, which gives compact closed
forms for the gradient and Hessian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ConvergenceError, DegenerateError, DomainError, PreconditionError
from .production import LogisticBoth, evaluate


@dataclass(frozen=True)
class MarketPrices:
    p0: float   # output price
    p1: float   # capital rental
    p2: float   # wage

    def __post_init__(self):
        if min(self.p0, self.p1, self.p2) <= 0:
            raise ValueError("prices must be strictly positive")

    def scaled(self, lam):
        return MarketPrices(lam * self.p0, lam * self.p1, lam * self.p2)


def profit(prices, f, K, L):
    """``p0 f(K, L) - p1 K - p2 L``.

    ``prices`` is a :class:`MarketPrices` or a plain ``(p0, p1, p2)`` tuple;
    the tuple form skips validation so zero factor costs can be used.
    """
    p0, p1, p2 = prices if isinstance(prices, tuple) else (prices.p0, prices.p1, prices.p2)
    return p0 * evaluate(f, K, L) - p1 * K - p2 * L


def _check_interior(f: LogisticBoth, K, L):
    if not (0 < K < f.NK and 0 < L < f.NL):
        raise DomainError("point must lie inside (0, NK) x (0, NL)")


def f5_derivatives(f: LogisticBoth, K, L):
    """Value, gradient and Hessian of f5 at an interior point of D'."""
    _check_interior(f, K, L)
    Y = evaluate(f, K, L)
    g = Y * (1.0 - Y / f.Nf)
    g2 = g * (1.0 - 2.0 * Y / f.Nf)
    u1 = f.NK / (K * (f.NK - K))
    v1 = f.NL / (L * (f.NL - L))
    u2 = -f.NK * (f.NK - 2.0 * K) / (K * (f.NK - K)) ** 2
    v2 = -f.NL * (f.NL - 2.0 * L) / (L * (f.NL - L)) ** 2
    a, b = f.alpha, f.beta
    grad = np.array([g * a * u1, g * b * v1])
    hess = np.array([[g2 * a * a * u1 * u1 + g * a * u2, g2 * a * b * u1 * v1],
                     [g2 * a * b * u1 * v1, g2 * b * b * v1 * v1 + g * b * v2]])
    return Y, grad, hess


# ---------------------------------------------------------------------------
# second-order report


@dataclass(frozen=True)
class SOCReport:
    values: tuple           # left-hand sides of the four inequalities
    passed: tuple           # pass/fail per inequality
    k_above_half: bool      # K > NK/2
    l_above_half: bool      # L > NL/2
    boundary: bool          # K == NK/2 or L == NL/2

    @property
    def all_pass(self):
        return all(self.passed)

    @property
    def region_ok(self):
        return self.k_above_half and self.l_above_half

    def as_dict(self):
        return {"values": list(self.values), "passed": list(self.passed),
                "k_above_half": self.k_above_half, "l_above_half": self.l_above_half,
                "boundary": self.boundary}


def check_soc(f: LogisticBoth, K, L) -> SOCReport:
    """Evaluate the four closed-form second-order inequalities at (K, L).

    1. ``alpha (alpha - 1) < 0``
    2. ``beta (beta - 1) < 0``
    3. ``(2K-NK)(2L-NL) + NL(2K-NK) beta + NK(2L-NL) alpha > 0``
    4. ``(2K-NK)(2L-NL) - NL(2K-NK) beta - NK(2L-NL) alpha > 0``
    """
    a, b, NK, NL = f.alpha, f.beta, f.NK, f.NL
    dk, dl = 2 * K - NK, 2 * L - NL
    vals = (a * (a - 1), b * (b - 1),
            dk * dl + NL * dk * b + NK * dl * a,
            dk * dl - NL * dk * b - NK * dl * a)
    passed = (vals[0] < 0, vals[1] < 0, vals[2] > 0, vals[3] > 0)
    return SOCReport(vals, passed, K > NK / 2, L > NL / 2, dk == 0 or dl == 0)


# ---------------------------------------------------------------------------
# first-order solver


@dataclass
class ProfitSolution:
    K: float
    L: float
    Y: float
    profit: float
    multiplier: float          # multiplier of the production constraint (= p0)
    foc_residual: float        # max |gradient of profit| / max price
    soc: SOCReport
    hessian_negative_definite: bool
    status: str                # "max" or "stationary, not max"
    iterations: int
    trace: list = field(default_factory=list)

    def as_dict(self):
        return {"K": self.K, "L": self.L, "Y": self.Y, "profit": self.profit,
                "multiplier": self.multiplier, "foc_residual": self.foc_residual,
                "soc": self.soc.as_dict(),
                "hessian_negative_definite": self.hessian_negative_definite,
                "status": self.status, "iterations": self.iterations}


def solve_foc(prices: MarketPrices, f: LogisticBoth, initial=None, tol=1e-8,
              max_iter=200) -> ProfitSolution:
    """Stationary point of profit inside D' by damped Newton.

    Parameters
    ----------
    prices : MarketPrices
    f : LogisticBoth
    initial : (K, L), optional
        Starting point, default ``(0.75 NK, 0.75 NL)``.
    tol : float
        Convergence threshold on ``max |grad profit| / max(p0, p1, p2)``.

    Returns
    -------
    ProfitSolution
        ``status`` is ``"max"`` when the Hessian of profit is negative
        definite at the solution and ``"stationary, not max"`` otherwise; the
        closed-form inequalities are reported separately in ``soc``.
    """
    if not isinstance(f, LogisticBoth):
        raise TypeError("solve_foc works with the f5 family")
    K, L = initial if initial is not None else (0.75 * f.NK, 0.75 * f.NL)
    K, L = float(K), float(L)
    try:
        _check_interior(f, K, L)
    except DomainError as exc:
        raise PreconditionError(str(exc)) from None
    p = np.array([prices.p1, prices.p2])
    scale = max(prices.p0, prices.p1, prices.p2)
    trace = []

    def resid(K, L):
        _, gr, H = f5_derivatives(f, K, L)
        return prices.p0 * gr - p, prices.p0 * H

    G, H = resid(K, L)
    for it in range(max_iter + 1):
        gnorm = float(np.max(np.abs(G))) / scale
        trace.append((K, L, gnorm))
        if gnorm <= tol:
            break
        if it == max_iter:
            raise ConvergenceError(f"no convergence in {max_iter} iterations", trace)
        try:
            step = -np.linalg.solve(H, G)
        except np.linalg.LinAlgError:
            step = -G / max(np.max(np.abs(np.diag(H))), 1e-12)
        # backtrack until the iterate stays in D' and the gradient norm drops
        t = 1.0
        while True:
            Kn, Ln = K + t * step[0], L + t * step[1]
            if 0 < Kn < f.NK and 0 < Ln < f.NL:
                Gn, Hn = resid(Kn, Ln)
                if np.max(np.abs(Gn)) < np.max(np.abs(G)) or t < 1e-10:
                    break
            t *= 0.5
            if t < 1e-12:
                raise ConvergenceError("line search failed to stay inside the domain", trace)
        K, L, G, H = Kn, Ln, Gn, Hn

    Y = evaluate(f, K, L)
    eig = np.linalg.eigvalsh(H)
    nd = bool(np.all(eig < 0))
    return ProfitSolution(K, L, Y, profit(prices, f, K, L), prices.p0, gnorm,
                          check_soc(f, K, L), nd, "max" if nd else "stationary, not max",
                          it, trace)


def grid_argmax(prices: MarketPrices, f: LogisticBoth, k_range, l_range, n=400):
    """Brute-force profit maximum on an ``n x n`` lattice over the given ranges.

    Ranges are half-open ``[lo, hi)``.  Returns ``(K, L, profit, dK, dL)``
    with the lattice spacings.
    """
    Kg = np.linspace(k_range[0], k_range[1], n, endpoint=False)
    Lg = np.linspace(l_range[0], l_range[1], n, endpoint=False)
    i, j, best = _kernels.profit_grid_argmax(Kg, Lg, f.Nf, f.NK, f.NL, f.alpha, f.beta, f.C,
                                             prices.p0, prices.p1, prices.p2)
    return float(Kg[i]), float(Lg[j]), best, Kg[1] - Kg[0], Lg[1] - Lg[0]


# ---------------------------------------------------------------------------
# consistency and recovery


@dataclass(frozen=True)
class ConsistencyVerdict:
    consistent: bool
    bound: str
    note: str = ""


def consistency_condition(alpha, beta, C) -> ConsistencyVerdict:
    """Asymptotic compatibility of profit maximization with perfect competition.

    For ``C > 0`` the exponents must satisfy ``0 < alpha + beta < 1``; for
    ``C < 0`` the requirement flips to ``alpha + beta > 1``.
    """
    s = alpha + beta
    if C == 0:
        raise DegenerateError("C = 0 makes output constant; no constraint on the exponents")
    if C > 0:
        return ConsistencyVerdict(0 < s < 1, "0 < alpha + beta < 1",
                                  "" if 0 < s < 1 else f"alpha + beta = {s:g} violates the bound")
    return ConsistencyVerdict(s > 1, "alpha + beta > 1",
                              "" if s > 1 else f"alpha + beta = {s:g} violates the bound")


@dataclass(frozen=True)
class ElasticityRecovery:
    alpha: float
    beta: float
    residual: float   # |f5 relation| at the recovered exponents, in log units


def recover_elasticities(prices: MarketPrices, K, L, Y, Nf, NK, NL, C,
                         printed=False) -> ElasticityRecovery:
    """Output elasticities implied by prices at a profit-maximizing point.

    ``alpha = p1 Nf K (NK-K) / (p0 NK Y (Nf-Y))`` follows from the capital
    first-order condition; ``beta`` then follows from the f5 relation
    ``ln((Nf-Y)/(C Y)) = alpha ln((NK-K)/K) + beta ln((NL-L)/L)``.

    With ``printed=True`` the wage ``p2`` replaces ``p1`` in the alpha
    formula, as it is commonly quoted; that version only agrees with the
    first-order conditions when ``p1 == p2``.
    """
    if not (0 < Y < Nf and 0 < K < NK and 0 < L < NL):
        raise DomainError("need 0 < Y < Nf, 0 < K < NK, 0 < L < NL")
    price = prices.p2 if printed else prices.p1
    alpha = price * Nf * K * (NK - K) / (prices.p0 * NK * Y * (Nf - Y))
    arg_f = abs(Nf - Y) / (C * Y)
    if arg_f <= 0:
        raise DomainError("logarithm argument (Nf - Y)/(C Y) must be positive")
    lf = math.log(arg_f)
    lk = math.log(abs(NK - K) / K)
    ll = math.log(abs(NL - L) / L)
    if ll == 0.0:
        raise DegenerateError("L = NL/2 leaves beta undetermined")
    beta = (lf - alpha * lk) / ll
    return ElasticityRecovery(alpha, beta, abs(lf - alpha * lk - beta * ll))
