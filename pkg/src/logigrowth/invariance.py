"""Numeric checks of the symmetry properties of the growth models.

Everything here is verified by finite differences or by transporting points
along closed-form flows; nothing is symbolic.

* :func:`holotheticity_residual` - how far ``xi f_K + eta f_L`` is from a
  prescribed output rate ``H``.
* :func:`isoquant_preservation` - flows co-isoquant points and checks that
  their images share a level again.
* :func:`distribution_integrability` - numeric Lie bracket of two fields on
  (K, L, f).
* :func:`characteristic_reconstruct` - integrates characteristic systems and
  tracks the closed-form invariants along the trajectories.
* Wage shares and the fundamental differential invariants of the projective
  actions on (x, y, y_x) with x = L/K, y = Y/K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DegenerateError, DomainError, PoleError, PreconditionError, \
    UnsupportedFamilyError
from .growth import GrowthModel, infinitesimal
from .production import (CobbDouglas, LogisticBoth, ProductionFunction, evaluate,
                         f5_isoquant_labor)


# ---------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class Generator:
    """Vector field ``xi d/dK + eta d/dL (+ zeta d/df)``.

    ``xi`` and ``eta`` are callables of (K, L); ``zeta`` is an optional
    callable of f for fields acting on output as well.
    """

    xi: Callable
    eta: Callable
    zeta: Callable | None = None

    @classmethod
    def from_model(cls, model: GrowthModel, zeta=None):
        return cls(lambda K, L: infinitesimal(model.law_k, K),
                   lambda K, L: infinitesimal(model.law_l, L), zeta)

    @classmethod
    def exponential(cls, a, b, c=None):
        zeta = None if c is None else (lambda f: c * f)
        return cls(lambda K, L: a * K, lambda K, L: b * L, zeta)

    @classmethod
    def logistic(cls, a, b, NK, NL, c=None, Nf=None):
        zeta = None if c is None else (lambda f: c * f * (1.0 - f / Nf))
        return cls(lambda K, L: a * K * (1.0 - K / NK), lambda K, L: b * L * (1.0 - L / NL), zeta)

    @classmethod
    def wage_share_action(cls, lam):
        """Action on (K, L) induced by logistic growth of x = L/K with capital held fixed."""
        return cls(lambda K, L: 0.0 * K, lambda K, L: lam * L * (1.0 - L / K))

    def field3(self, p):
        """Components on (K, L, f); a missing ``zeta`` counts as zero."""
        K, L, f = p
        z = 0.0 if self.zeta is None else self.zeta(f)
        return np.array([self.xi(K, L), self.eta(K, L), z], dtype=float)


def logistic_output_rate(c, Nf):
    """Output rate ``H(f) = c f (1 - f/Nf)`` in the ``H(f, K, L)`` calling convention."""
    return lambda f, K, L: c * f * (1.0 - f / Nf)


def linear_output_rate(c):
    return lambda f, K, L: c * f


# ---------------------------------------------------------------------------
# holotheticity


class HolotheticityReport(NamedTuple):
    max_residual: float
    used: int
    skipped: list


def _near_kink(f, K, L, margin=1e-3):
    for var, where in f.kinks().items():
        x = K if var == "K" else L
        if abs(x - where) <= margin * abs(where):
            return True
    if f.family == "f9" and abs(L - K) <= margin * abs(L):
        return True
    return False


# cube root of machine epsilon balances truncation and round-off for
# centered differences at index-scale magnitudes
HOLO_REL_STEP = float(np.finfo(float).eps) ** (1.0 / 3.0)


def holotheticity_residual(gen: Generator, f: ProductionFunction, H, samples,
                           rel_step=HOLO_REL_STEP) -> HolotheticityReport:
    """Max over samples of ``|xi f_K + eta f_L - H(f, K, L)|``.

    Partials are centered finite differences with step ``rel_step * |x|``.
    Samples within a relative margin of 1e-3 of a kink are skipped and
    returned in ``skipped``.
    """
    worst = 0.0
    skipped = []
    used = 0
    for K, L in samples:
        K, L = float(K), float(L)
        if _near_kink(f, K, L):
            skipped.append((K, L))
            continue
        hk, hl = rel_step * K, rel_step * L
        fk = (evaluate(f, K + hk, L) - evaluate(f, K - hk, L)) / (2 * hk)
        fl = (evaluate(f, K, L + hl) - evaluate(f, K, L - hl)) / (2 * hl)
        y = evaluate(f, K, L)
        res = abs(gen.xi(K, L) * fk + gen.eta(K, L) * fl - H(y, K, L))
        worst = max(worst, res)
        used += 1
    return HolotheticityReport(worst, used, skipped)


# ---------------------------------------------------------------------------
# isoquants


def isoquant_points(f: ProductionFunction, level, K):
    """Labor inputs placing each capital value on the isoquant ``f = level``."""
    K = np.asarray(K, dtype=float)
    if isinstance(f, CobbDouglas):
        return (level / (f.A * K ** f.alpha)) ** (1.0 / f.beta)
    if isinstance(f, LogisticBoth):
        return f5_isoquant_labor(f, level, K)
    raise UnsupportedFamilyError(f"no isoquant solver for {f.family}")


class IsoquantReport(NamedTuple):
    input_level: float
    image_level: float
    image_spread: float     # max relative deviation of image values from their mean
    preserved: bool


def isoquant_preservation(model: GrowthModel, f: ProductionFunction, level_points, t,
                          tol=1e-6) -> IsoquantReport:
    """Flow co-isoquant points for time ``t`` and test whether the images are co-isoquant."""
    K, L = (np.asarray(v, dtype=float) for v in level_points)
    vals = np.atleast_1d(evaluate(f, K, L))
    level = float(np.mean(vals))
    if np.max(np.abs(vals - level)) > 1e-9 * max(1.0, abs(level)):
        raise PreconditionError("input points do not share an isoquant")
    Kt, Lt = model.flow(K, L, t)
    img = np.atleast_1d(evaluate(f, Kt, Lt))
    img_level = float(np.mean(img))
    spread = float(np.max(np.abs(img - img_level)) / abs(img_level))
    return IsoquantReport(level, img_level, spread, spread <= tol)


# ---------------------------------------------------------------------------
# Lie brackets


def _jacobian(F, p):
    p = np.asarray(p, dtype=float)
    J = np.empty((p.size, p.size))
    for j in range(p.size):
        h = max(1e-6, 1e-8 * abs(p[j]))
        e = np.zeros_like(p)
        e[j] = h
        J[:, j] = (F(p + e) - F(p - e)) / (2 * h)
    return J


def lie_bracket(X: Generator, Y: Generator, p):
    """``[X, Y] = J_Y X - J_X Y`` at the point ``p = (K, L, f)``."""
    p = np.asarray(p, dtype=float)
    return _jacobian(Y.field3, p) @ X.field3(p) - _jacobian(X.field3, p) @ Y.field3(p)


def distribution_integrability(X: Generator, Y: Generator, samples) -> float:
    """Max Euclidean norm of the numeric bracket over the sample points (K, L, f)."""
    return max(float(np.linalg.norm(lie_bracket(X, Y, p))) for p in samples)


# ---------------------------------------------------------------------------
# characteristics


@dataclass
class CharacteristicReport:
    system: str
    alpha: float | None            # closed-form exponents (None for the single-field case)
    beta: float | None
    recovered_alpha: float | None  # exponents read off the integrated trajectories
    recovered_beta: float | None
    drift: float                   # max deviation of the invariants along the trajectories
    truncated: bool
    trajectories: list = field(default_factory=list)

    @property
    def recovered_sum(self):
        if self.recovered_alpha is None:
            return None
        return self.recovered_alpha + self.recovered_beta


def _integrate(rhs, p0, span, bounds):
    lo, hi = bounds

    def leave(s, p):
        return min(np.min(p - lo), np.min(hi - p))
    leave.terminal = True

    sol = solve_ivp(lambda s, p: rhs(p), (0.0, span), p0, method="DOP853",
                    rtol=1e-10, atol=1e-12, events=leave, dense_output=False)
    if not sol.success:
        raise DomainError(f"characteristic integration failed: {sol.message}")
    return sol.y.T, sol.status == 1


def _logit(p, N):
    return np.log(p / (N - p))


def characteristic_reconstruct(system: str, params: dict, initial, span=1.0) -> CharacteristicReport:
    """Integrate a characteristic system and follow its invariants.

    Parameters
    ----------
    system : {"single", "exponential_pair", "logistic_pair"}
        ``"single"``: one field ``(aK, bL, cf)``; the invariants
        ``ln L/b - ln K/a`` and ``ln f/c - ln K/a`` are tracked.
        ``"exponential_pair"``: the pair ``(K, L, f)`` and ``(aK, bL, f)``; the
        Cobb-Douglas exponents are recovered from the trajectories.
        ``"logistic_pair"``: the logistic pair with rates (1, 1, 1) and (a, b, c) and
        capacities ``NK, NL, Nf``; the logistic exponents are recovered the
        same way and the f5 relation is tracked.
    params : dict
        ``a``, ``b`` (and ``c``, capacities as needed).
    initial : (K, L, f)
    span : float
        Integration length along each field.
    """
    a, b = params["a"], params["b"]
    p0 = np.asarray(initial, dtype=float)
    if np.any(p0 <= 0):
        raise DomainError("initial point must be interior")

    if system == "single":
        c = params["c"]
        if a == 0 or b == 0 or c == 0:
            raise DegenerateError("rates must be nonzero")
        traj, trunc = _integrate(lambda p: np.array([a, b, c]) * p, p0, span,
                                 (0.0, np.inf))
        lK, lL, lf = np.log(traj).T
        inv1 = lL / b - lK / a
        inv2 = lf / c - lK / a
        drift = max(np.ptp(inv1), np.ptp(inv2))
        return CharacteristicReport(system, None, None, None, None, float(drift), trunc, [traj])

    if a == b:
        raise DegenerateError("a == b leaves the exponents undefined")

    if system == "exponential_pair":
        alpha, beta = (1 - b) / (a - b), (a - 1) / (a - b)
        rates = [np.ones(3), np.array([a, b, 1.0])]
        bounds = (0.0, np.inf)
        rhs = [lambda p, r=r: r * p for r in rates]
        coords = np.log
    elif system == "logistic_pair":
        c = params["c"]
        N = np.array([params["NK"], params["NL"], params["Nf"]], dtype=float)
        if np.any(p0 >= N):
            raise DomainError("initial point must lie below all capacities")
        alpha, beta = (c - b) / (a - b), (a - c) / (a - b)
        rates = [np.ones(3), np.array([a, b, c])]
        bounds = (np.zeros(3), N)
        rhs = [lambda p, r=r: r * p * (1.0 - p / N) for r in rates]

        def coords(q):
            return _logit(q, N)
    else:
        raise ValueError(f"unknown characteristic system {system!r}")

    trajs, rows, rhs_vals, drift, trunc = [], [], [], 0.0, False
    phi0 = None
    for F in rhs:
        traj, tr = _integrate(F, p0, span, bounds)
        trunc = trunc or tr
        z = coords(traj)
        phi = z[:, 2] - alpha * z[:, 0] - beta * z[:, 1]
        phi0 = phi[0] if phi0 is None else phi0
        drift = max(drift, float(np.max(np.abs(phi - phi0))))
        d = z[-1] - z[0]
        rows.append(d[:2])
        rhs_vals.append(d[2])
        trajs.append(traj)
    try:
        ra, rb = np.linalg.solve(np.array(rows), np.array(rhs_vals))
    except np.linalg.LinAlgError:
        raise DegenerateError("trajectories too short to separate the exponents") from None
    return CharacteristicReport(system, alpha, beta, float(ra), float(rb), drift, trunc, trajs)


# ---------------------------------------------------------------------------
# wage shares and differential invariants


@dataclass(frozen=True)
class WageShareFrame:
    """A point (x, y, y_x) of an intensive-form curve with projective growth rates.

    ``x = L/K``, ``y = Y/K``; ``lam`` and ``gamma`` are the growth rates of x
    and y.
    """

    x: float
    y: float
    y_x: float
    gamma: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        if not (self.x > 0 and self.y > 0):
            raise DomainError("x and y must be positive")
        if self.gamma < 0 or self.lam < 0:
            raise ValueError("rates must be nonnegative")


def wage_share(frame: WageShareFrame) -> float:
    """Classical wage share ``x y_x / y``."""
    return frame.x * frame.y_x / frame.y


def modified_wage_share(frame: WageShareFrame) -> float:
    """Modified wage share ``x |x-1| y_x / (y |y-1|)``."""
    x, y = frame.x, frame.y
    if x == 1.0:
        return 0.0
    if y == 1.0:
        raise PoleError("modified wage share has a pole at y = 1", locus={"y": 1.0})
    return x * abs(x - 1.0) * frame.y_x / (y * abs(y - 1.0))


def fundamental_invariants(case: str, frame: WageShareFrame, gamma=None, lam=None):
    """The two fundamental differential invariants (I1, I2) of the projective action.

    ``case`` is ``"exponential"`` or ``"logistic"``.  In the logistic case
    the fractional powers are taken of absolute values so both sides of the
    lines x = 1 and y = 1 give real numbers.
    """
    g = frame.gamma if gamma is None else gamma
    lm = frame.lam if lam is None else lam
    if not (g > 0 and lm > 0):
        raise DomainError("rates must be positive")
    x, y, yx = frame.x, frame.y, frame.y_x
    if case == "exponential":
        return y * x ** (-g / lm), yx * x ** ((lm - g) / lm)
    if case == "logistic":
        if x == 1.0 or y == 1.0:
            raise PoleError("logistic invariants have poles at x = 1 and y = 1")
        I1 = -((y - 1.0) / y) * abs(x / (x - 1.0)) ** (g / lm)
        I2 = (2 * g * x) ** 2 * yx / (y - 1.0) ** 2 * abs((1.0 - x) / x) ** ((g + lm) / lm)
        return I1, I2
    raise ValueError(f"unknown case {case!r}")


def exponential_projective_flow(frame: WageShareFrame, t) -> WageShareFrame:
    """Prolonged exponential action: x e^{lam t}, y e^{gamma t}, slope e^{(gamma-lam) t}."""
    g, lm = frame.gamma, frame.lam
    return replace(frame, x=frame.x * math.exp(lm * t), y=frame.y * math.exp(g * t),
                   y_x=frame.y_x * math.exp((g - lm) * t))


def _unit_logistic(z, rate, t):
    return 1.0 / (1.0 + (1.0 / z - 1.0) * math.exp(-rate * t))


def logistic_projective_flow(frame: WageShareFrame, t) -> WageShareFrame:
    """Prolonged unit-capacity logistic action on (x, y, y_x), slope by the chain rule."""
    g, lm = frame.gamma, frame.lam
    xb = _unit_logistic(frame.x, lm, t)
    yb = _unit_logistic(frame.y, g, t)
    dx = xb ** 2 * math.exp(-lm * t) / frame.x ** 2
    dy = yb ** 2 * math.exp(-g * t) / frame.y ** 2
    return replace(frame, x=xb, y=yb, y_x=dy * frame.y_x / dx)


def transported_slope_fd(curve, x, t, gamma, lam, case="logistic", h=1e-6):
    """Slope of the image of the curve ``y = curve(x)`` by finite differences.

    Cross-check for the chain-rule slope in the projective flows.
    """
    if case == "logistic":
        def mp(u):
            return _unit_logistic(u, lam, t), _unit_logistic(curve(u), gamma, t)
    else:
        def mp(u):
            return u * math.exp(lam * t), curve(u) * math.exp(gamma * t)
    x1, y1 = mp(x - h)
    x2, y2 = mp(x + h)
    return (y2 - y1) / (x2 - x1)


# ---------------------------------------------------------------------------
# invariant of the one-input logistic construction


def kink_invariant(K, L, alpha, NK, NL):
    """``L^alpha / |NL - L|^alpha * (NK - K) / K``."""
    return L ** alpha / abs(NL - L) ** alpha * (NK - K) / K


def kink_invariant_residual(a, b, NK, NL, alpha, samples) -> float:
    """Max relative size of ``U1 I`` over the samples, U1 with logistic rates (a, b).

    Vanishes exactly when ``alpha = a / b``.
    """
    gen = Generator.logistic(a, b, NK, NL)
    worst = 0.0
    for K, L in samples:
        hk, hl = max(1e-6, 1e-8 * K), max(1e-6, 1e-8 * L)
        IK = (kink_invariant(K + hk, L, alpha, NK, NL) - kink_invariant(K - hk, L, alpha, NK, NL)) / (2 * hk)
        IL = (kink_invariant(K, L + hl, alpha, NK, NL) - kink_invariant(K, L - hl, alpha, NK, NL)) / (2 * hl)
        val = gen.xi(K, L) * IK + gen.eta(K, L) * IL
        worst = max(worst, abs(val) / abs(kink_invariant(K, L, alpha, NK, NL)))
    return worst
