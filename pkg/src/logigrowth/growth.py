"""One-parameter growth groups acting on factors.

Exponential growth ``x -> x e^{rt}`` and logistic growth
``x -> N x / (x + (N - x) e^{-rt})`` are both flows of one-parameter groups;
:class:`GrowthModel` pairs one law per factor (capital, labor), which gives
the four regimes G (exp, exp), G1 (log, log), G2 (log, exp), G3 (exp, log).

The module also holds the piecewise "shock" construction for the one-input
logistic production function, where the input jumps from the sub-capacity
logistic branch to the super-capacity branch at a switch time ``t1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import DomainError, PreconditionError

EXPONENTIAL = "exponential"
LOGISTIC = "logistic"


@dataclass(frozen=True)
class GrowthLaw:
    """Growth specification for a single variable.

    Parameters
    ----------
    kind : {"exponential", "logistic"}
    rate : float
        Positive growth rate per unit time.
    capacity : float, optional
        Carrying capacity; required for logistic laws and forbidden for
        exponential ones.
    """

    kind: str
    rate: float
    capacity: float | None = None

    def __post_init__(self):
        if self.kind not in (EXPONENTIAL, LOGISTIC):
            raise ValueError(f"unknown growth kind {self.kind!r}")
        if not self.rate > 0:
            raise ValueError("rate must be positive")
        if self.kind == LOGISTIC:
            if self.capacity is None or not self.capacity > 0:
                raise ValueError("logistic law needs a positive capacity")
        elif self.capacity is not None:
            raise ValueError("exponential law takes no capacity")

    @classmethod
    def exponential(cls, rate):
        return cls(EXPONENTIAL, float(rate))

    @classmethod
    def logistic(cls, rate, capacity):
        return cls(LOGISTIC, float(rate), float(capacity))


def _check_positive(x, name="x0"):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"{name} must be strictly positive")
    return arr


def flow(law: GrowthLaw, x0, t):
    """Image of ``x0`` after time ``t`` under the group generated by ``law``.

    Works elementwise on arrays.  A logistic orbit started above capacity
    runs off to infinity in finite backward time; asking for a time beyond
    that raises :class:`DomainError`.
    """
    x0a = _check_positive(x0)
    ta = np.asarray(t, dtype=float)
    if law.kind == EXPONENTIAL:
        out = x0a * np.exp(law.rate * ta)
    else:
        out = _kernels.logistic_flow(x0a, ta, law.rate, law.capacity)
        if np.any(np.isnan(out)):
            raise DomainError("logistic orbit above capacity escapes to infinity before time t")
    if np.ndim(out) == 0:
        return float(out)
    return out


def infinitesimal(law: GrowthLaw, x):
    """Velocity of the flow at ``x`` (the generator coefficient)."""
    xa = _check_positive(x, "x")
    if law.kind == EXPONENTIAL:
        out = law.rate * xa
    else:
        out = law.rate * xa * (1.0 - xa / law.capacity)
    return float(out) if np.ndim(out) == 0 else out


def escape_time(law: GrowthLaw, x0):
    """Backward time at which a super-capacity logistic orbit blows up.

    Returns ``-inf`` when the orbit exists for all times.
    """
    if law.kind == EXPONENTIAL or x0 <= law.capacity:
        return -math.inf
    return -math.log(x0 / (x0 - law.capacity)) / law.rate


@dataclass(frozen=True)
class GrowthModel:
    law_k: GrowthLaw
    law_l: GrowthLaw

    @property
    def regime(self):
        kinds = (self.law_k.kind, self.law_l.kind)
        return {
            (EXPONENTIAL, EXPONENTIAL): "G",
            (LOGISTIC, LOGISTIC): "G1",
            (LOGISTIC, EXPONENTIAL): "G2",
            (EXPONENTIAL, LOGISTIC): "G3",
        }[kinds]

    @classmethod
    def exponential(cls, rate_k, rate_l):
        return cls(GrowthLaw.exponential(rate_k), GrowthLaw.exponential(rate_l))

    @classmethod
    def logistic(cls, rate_k, rate_l, capacity_k, capacity_l):
        return cls(GrowthLaw.logistic(rate_k, capacity_k), GrowthLaw.logistic(rate_l, capacity_l))

    def flow(self, K, L, t):
        return flow(self.law_k, K, t), flow(self.law_l, L, t)

    def velocity(self, K, L):
        """Components (xi, eta) of the generating vector field at (K, L)."""
        return infinitesimal(self.law_k, K), infinitesimal(self.law_l, L)


# ---------------------------------------------------------------------------
# shock construction


@dataclass(frozen=True)
class ShockSpec:
    """Switch from the sub-capacity to the super-capacity input branch.

    ``alpha`` is the exponent of the one-input logistic production function;
    it must be an even positive integer unless ``allow_odd`` is set.
    """

    capacity_x: float
    capacity_f: float
    alpha: int
    C: float
    C1: float
    C2: float
    rate: float
    t1: float
    allow_odd: bool = False

    def __post_init__(self):
        if self.capacity_x <= 0 or self.capacity_f <= 0:
            raise ValueError("capacities must be positive")
        if int(self.alpha) != self.alpha or self.alpha <= 0:
            raise ValueError("alpha must be a positive integer")
        if self.alpha % 2 and not self.allow_odd:
            raise ValueError("alpha must be even (pass allow_odd=True to override)")
        if not (self.C1 > 0 and 0 < self.C2 < 1):
            raise ValueError("need C1 > 0 and 0 < C2 < 1")
        if self.rate <= 0:
            raise ValueError("rate must be positive")
        lo, hi = self.window
        if not lo < self.t1 < hi:
            raise ValueError(f"switch time t1={self.t1} outside ({lo}, {hi})")

    @property
    def window(self):
        return 0.0, math.log(1.0 / self.C2) / self.rate


def shock_branches(spec: ShockSpec, t):
    """Both output branches ``(y1, y2)`` evaluated at ``t`` without domain checks."""
    t = np.asarray(t, dtype=float)
    a = spec.rate
    y1 = spec.capacity_f / (spec.C * (spec.C1 * np.exp(-a * t)) ** spec.alpha + 1.0)
    y2 = spec.capacity_f / (spec.C * (spec.C2 * np.exp(a * t)) ** spec.alpha + 1.0)
    return y1, y2


def shock_input(spec: ShockSpec, t):
    """Input path: below capacity before ``t1``, above capacity after.

    The super-capacity branch is ``N / (1 - C2 e^{at})``, the solution of
    ``x' = a x (x - N) / N`` that is consistent with the output branch y2.
    """
    t = _in_window(spec, t)
    a = spec.rate
    x1 = spec.capacity_x / (1.0 + spec.C1 * np.exp(-a * t))
    x2 = spec.capacity_x / (1.0 - spec.C2 * np.exp(a * t))
    return np.where(t < spec.t1, x1, x2)


def _in_window(spec, t):
    t = np.asarray(t, dtype=float)
    lo, hi = spec.window
    if np.any((t <= lo) | (t >= hi)):
        raise DomainError(f"t must lie in the open window ({lo}, {hi})")
    return t


def shock_response(spec: ShockSpec, t):
    """Output ``y(t) = (H_0 - H_t1) y1 + H_t1 y2`` inside the growth window."""
    t = _in_window(spec, t)
    y1, y2 = shock_branches(spec, t)
    y = np.where(t < spec.t1, y1, y2)
    return float(y) if y.ndim == 0 else y


class ShockGap(NamedTuple):
    direct: float        # y2(t1) - y1(t1)
    printed: float       # closed form as printed, exponent = rate, b = alpha * rate
    reconciled: float    # printed form with the exponent alpha restored
    printed_residual: float
    reconciled_residual: float


def shock_gap(spec: ShockSpec) -> ShockGap:
    """Jump of the output at the switch time, three ways.

    The printed closed form uses the rate as exponent and measures
    ``y1 - y2``; the residuals are taken against ``y1 - y2`` so the two
    conventions can be compared directly.
    """
    t1 = spec.t1
    a, al, C, Nf = spec.rate, spec.alpha, spec.C, spec.capacity_f
    b = al * a
    y1, y2 = (float(v) for v in shock_branches(spec, t1))
    direct = y2 - y1

    def closed(p):
        num = C * Nf * (spec.C2 ** p * math.exp(b * t1) - spec.C1 ** p * math.exp(-b * t1))
        den = (C * (spec.C1 * math.exp(-a * t1)) ** p + 1.0) * (C * (spec.C2 * math.exp(a * t1)) ** p + 1.0)
        return num / den

    printed = closed(a)
    reconciled = closed(al)
    return ShockGap(direct, printed, reconciled, printed - (y1 - y2), reconciled - (y1 - y2))


def steady_state_limit(spec: ShockSpec):
    """Limit of the super-capacity branch at the end of the window."""
    return spec.capacity_f / (spec.C + 1.0)
