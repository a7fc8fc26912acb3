"""Production functions, marginal products and curvature probes.

Families
--------
===================  ==========================================================
``CobbDouglas``      A K^a L^b
``Capasso``          a1 K^p L^(1-p) / (1 + a2 K^p L^(1-p))
``LogisticBoth``     Nf K^a L^b / (C |NK-K|^a |NL-L|^b + K^a L^b)       (f5)
``LogisticOne``      Nf x^a / (C |Nx-x|^a + x^a)                        (f6)
``LogisticKOnly``    Nf K^a L^b / (C |NK-K|^a + K^a L^b)                (f7)
``LogisticLOnly``    Nf K^a L^b / (C |NL-L|^b + K^a L^b)                (f8)
``WageShareCompatible``  K L^c3 / (L^c3 + c4 |L-K|^c3)                  (f9)
``ForcedExponential``    c1 (K/|1-K|)^c2 (L/|1-L|)^c3                  (f10)
===================  ==========================================================

Absolute values are kept literally, so the logistic families have kinks on
the capacity lines; finite differences switch to one-sided stencils there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import (DegenerateError, DomainError, PoleError, SingularityError,
                     UndefinedSteadyStateError, UnsupportedFamilyError)


def fd_step(x):
    """Centered finite-difference step used throughout the package."""
    return max(1e-6, 1e-8 * abs(x))


class ProductionFunction:
    """Common behaviour of the families below.

    Subclasses implement ``_value(K, L)`` on float arrays and may override
    ``kinks`` (capacity lines where absolute values switch branch) and
    ``singular_loci`` (lines where the function blows up).
    """

    family = "abstract"
    n_inputs = 2

    def _value(self, K, L):
        raise NotImplementedError

    def kinks(self):
        return {}

    def singular_loci(self):
        return {}

    def __call__(self, K, L=None):
        return evaluate(self, K, L)

    def params(self):
        return {k: v for k, v in self.__dict__.items()}


def _ratio_value(Nf, r, C, K, L):
    """Nf / (1 + C r) with a singularity check on the denominator."""
    with np.errstate(invalid="ignore", over="ignore"):
        den = 1.0 + C * r
    bad = ~(den > 0)
    if np.any(bad):
        Kb, Lb = np.broadcast_arrays(K, L)
        raise SingularityError("denominator vanishes or changes sign",
                               locus=np.column_stack([Kb[bad], Lb[bad]]))
    return Nf / den


@dataclass(frozen=True)
class CobbDouglas(ProductionFunction):
    A: float
    alpha: float
    beta: float
    family = "cobb-douglas"

    def _value(self, K, L):
        return self.A * K ** self.alpha * L ** self.beta


@dataclass(frozen=True)
class Capasso(ProductionFunction):
    alpha1: float
    alpha2: float
    p: float
    family = "f4"

    def __post_init__(self):
        if not (self.alpha1 > 0 and self.alpha2 >= 0 and self.p >= 1):
            raise ValueError("need alpha1 > 0, alpha2 >= 0, p >= 1")

    def _value(self, K, L):
        z = K ** self.p * L ** (1.0 - self.p)
        return self.alpha1 * z / (1.0 + self.alpha2 * z)


@dataclass(frozen=True)
class LogisticBoth(ProductionFunction):
    """Two-input logistic production function (f5).

    Use :meth:`from_rates` to build it from the growth rates (a, b) of
    capital and labor and the output rate c, which fixes
    ``alpha = (c-b)/(a-b)``, ``beta = (a-c)/(a-b)`` and hence
    ``alpha + beta = 1``.
    """

    Nf: float
    NK: float
    NL: float
    alpha: float
    beta: float
    C: float
    family = "f5"

    def __post_init__(self):
        if not (self.Nf > 0 and self.NK > 0 and self.NL > 0):
            raise ValueError("capacities must be strictly positive")

    @classmethod
    def from_rates(cls, a, b, c, Nf, NK, NL, C):
        if a == b:
            raise DegenerateError("a == b leaves the exponents undefined")
        return cls(Nf, NK, NL, (c - b) / (a - b), (a - c) / (a - b), C)

    def _value(self, K, L):
        Y, den = _kernels.f5_values(K, L, self.Nf, self.NK, self.NL, self.alpha, self.beta, self.C)
        bad = ~(den > 0)
        if np.any(bad):
            Kb, Lb = np.broadcast_arrays(K, L)
            raise SingularityError("f5 denominator vanishes or changes sign",
                                   locus=np.column_stack([Kb[bad], Lb[bad]]))
        return Y

    def kinks(self):
        return {"K": self.NK, "L": self.NL}


@dataclass(frozen=True)
class LogisticOne(ProductionFunction):
    """One-input logistic production function (f6); the input is ``K``."""

    Nf: float
    Nx: float
    alpha: float
    C: float
    family = "f6"
    n_inputs = 1

    def _value(self, K, L):
        with np.errstate(divide="ignore", over="ignore"):
            r = (np.abs(self.Nx - K) / K) ** self.alpha
        return _ratio_value(self.Nf, r, self.C, K, K)

    def kinks(self):
        return {"K": self.Nx}


@dataclass(frozen=True)
class LogisticKOnly(ProductionFunction):
    Nf: float
    NK: float
    alpha: float
    beta: float
    C: float
    family = "f7"

    def _value(self, K, L):
        with np.errstate(divide="ignore", over="ignore"):
            r = np.abs(self.NK - K) ** self.alpha / (K ** self.alpha * L ** self.beta)
        return _ratio_value(self.Nf, r, self.C, K, L)

    def kinks(self):
        return {"K": self.NK}


@dataclass(frozen=True)
class LogisticLOnly(ProductionFunction):
    Nf: float
    NL: float
    alpha: float
    beta: float
    C: float
    family = "f8"

    def _value(self, K, L):
        with np.errstate(divide="ignore", over="ignore"):
            r = np.abs(self.NL - L) ** self.beta / (K ** self.alpha * L ** self.beta)
        return _ratio_value(self.Nf, r, self.C, K, L)

    def kinks(self):
        return {"L": self.NL}


@dataclass(frozen=True)
class WageShareCompatible(ProductionFunction):
    """Degree-one homogeneous function (f9) built from the modified wage share."""

    C3: float
    C4: float
    family = "f9"

    def __post_init__(self):
        if not 0 < self.C3 < 1:
            raise ValueError("C3 must lie in (0, 1)")

    def _value(self, K, L):
        r = (np.abs(L - K) / L) ** self.C3
        return K * _ratio_value(1.0, r, self.C4, K, L)

    def intensive(self, x):
        """Output-capital ratio y as a function of the labor-capital ratio x."""
        x = np.asarray(x, dtype=float)
        return 1.0 / (1.0 + self.C4 * (np.abs(x - 1.0) / x) ** self.C3)


@dataclass(frozen=True)
class ForcedExponential(ProductionFunction):
    """Unit-capacity function (f10) obtained by forcing exponential output growth."""

    C1: float
    C2: float
    C3: float
    family = "f10"

    def __post_init__(self):
        if not self.C1 > 0:
            raise ValueError("C1 must be positive")

    def _value(self, K, L):
        on_k = K == 1.0
        on_l = L == 1.0
        if np.any(on_k) or np.any(on_l):
            raise SingularityError("f10 is singular on K = 1 and L = 1",
                                   locus={"K": 1.0} if np.any(on_k) else {"L": 1.0})
        return self.C1 * (K / np.abs(1.0 - K)) ** self.C2 * (L / np.abs(1.0 - L)) ** self.C3

    def singular_loci(self):
        return {"K": 1.0, "L": 1.0}


FAMILIES = {cls.family: cls for cls in (CobbDouglas, Capasso, LogisticBoth, LogisticOne,
                                        LogisticKOnly, LogisticLOnly, WageShareCompatible,
                                        ForcedExponential)}


def make(family: str, **params) -> ProductionFunction:
    """Build a family member from its tag (``"f5"``, ``"cobb-douglas"``, ...)."""
    try:
        cls = FAMILIES[family]
    except KeyError:
        raise UnsupportedFamilyError(f"unknown family {family!r}") from None
    return cls(**params)


# ---------------------------------------------------------------------------
# evaluation


def evaluate(f: ProductionFunction, K, L=None):
    """Closed-form value of ``f`` at (K, L); elementwise on arrays.

    One-input families (f6) take their input as ``K`` and ignore ``L``.
    """
    Ka = np.asarray(K, dtype=float)
    if f.n_inputs == 1:
        La = Ka
    else:
        if L is None:
            raise TypeError(f"{f.family} needs both K and L")
        La = np.asarray(L, dtype=float)
    if np.any(~(Ka > 0)) or np.any(~(La > 0)):
        raise DomainError("factor inputs must be strictly positive")
    out = f._value(Ka, La)
    return float(out) if np.ndim(out) == 0 else out


def steady_state(f: ProductionFunction) -> float:
    """Limit ``Nf / (C + 1)`` of f5 / f6 as the inputs grow without bound."""
    if not isinstance(f, (LogisticBoth, LogisticOne)):
        raise UnsupportedFamilyError(f"no steady state defined for {f.family}")
    if f.C == -1:
        raise UndefinedSteadyStateError("C = -1 makes the steady state undefined")
    return f.Nf / (f.C + 1.0)


# ---------------------------------------------------------------------------
# derivatives


class Marginals(NamedTuple):
    mpk: float
    mpl: float
    one_sided: tuple = ()   # names of variables differentiated on a one-sided stencil


def _partial(f, K, L, var):
    """Centered difference in ``var``; one-sided (from below) next to a kink."""
    x = K if var == "K" else L
    # shrink the step next to the origin so the stencil stays in the domain
    h = min(fd_step(x), 0.25 * x)
    kink = f.kinks().get(var)

    def at(v):
        return evaluate(f, v, L) if var == "K" else evaluate(f, K, v)

    if kink is not None and abs(x - kink) < 2 * h:
        # second-order backward stencil, stays on the sub-capacity side
        base = min(x, kink)
        return (3 * at(base) - 4 * at(base - h) + at(base - 2 * h)) / (2 * h), True
    return (at(x + h) - at(x - h)) / (2 * h), False


def f9_marginals(f: WageShareCompatible, K, L):
    """Closed-form marginal products of f9 (off the kink K = L)."""
    if K == L:
        raise SingularityError("f9 marginal products are singular on K = L", locus={"K": K, "L": L})
    w = abs(1.0 - K / L) ** f.C3
    den = 1.0 + f.C4 * w
    mpk = 1.0 / den + f.C3 * f.C4 * K / (L - K) * w / den ** 2
    mpl = -f.C3 * f.C4 * K ** 2 / (L * (L - K)) * w / den ** 2
    return mpk, mpl


def f9_marginals_printed(f: WageShareCompatible, K, L):
    """The marginal products in the form they are usually quoted.

    The labor term carries the opposite sign to the true derivative; kept for
    comparison only.
    """
    mpk, mpl = f9_marginals(f, K, L)
    return mpk, -mpl


def f9_mrts_printed(f: WageShareCompatible, K, L):
    """Quoted closed form of the f9 MRTS; equals ``-MP_K / MP_L``."""
    if K == L:
        raise SingularityError("f9 MRTS is singular on K = L", locus={"K": K, "L": L})
    w = abs(1.0 - K / L) ** f.C3
    return (1.0 / (f.C3 * f.C4)) * L * (L - K) / K ** 2 * (1.0 + f.C4 * w) / w + L / K


def marginal_products(f: ProductionFunction, K, L=None) -> Marginals:
    if isinstance(f, WageShareCompatible):
        return Marginals(*f9_marginals(f, K, L))
    if f.n_inputs == 1:
        mpk, sk = _partial(f, K, K, "K")
        return Marginals(mpk, 0.0, ("K",) if sk else ())
    mpk, sk = _partial(f, K, L, "K")
    mpl, sl = _partial(f, K, L, "L")
    flags = tuple(v for v, s in (("K", sk), ("L", sl)) if s)
    return Marginals(mpk, mpl, flags)


def mrts(f: ProductionFunction, K, L) -> float:
    """Marginal rate of technical substitution MP_K / MP_L."""
    m = marginal_products(f, K, L)
    if m.mpl == 0.0:
        raise DegenerateError("MP_L vanishes; isoquant is vertical")
    return m.mpk / m.mpl


def second_partials(f: ProductionFunction, K, L):
    """(f_KK, f_LL) by three-point differences with a curvature-sized step."""
    hk = min(max(1e-4, 1e-4 * abs(K)), 0.25 * K)
    hl = min(max(1e-4, 1e-4 * abs(L)), 0.25 * L)
    f0 = evaluate(f, K, L)
    fkk = (evaluate(f, K + hk, L) - 2 * f0 + evaluate(f, K - hk, L)) / hk ** 2
    fll = (evaluate(f, K, L + hl) - 2 * f0 + evaluate(f, K, L - hl)) / hl ** 2
    return fkk, fll


def returns_to_scale_probe(f: ProductionFunction, K, L, r) -> float:
    """Scaling exponent ``log(f(rK, rL) / f(K, L)) / log r``; 1 means CRS."""
    if not r > 0 or r == 1:
        raise DomainError("scale factor must be positive and different from 1")
    return math.log(evaluate(f, r * K, r * L) / evaluate(f, K, L)) / math.log(r)


# ---------------------------------------------------------------------------
# probes


@dataclass
class SingularityReport:
    locus: dict
    distances: list
    values: list
    diverges: bool


def singularity_probe(f: ProductionFunction, K_ref=0.5, L_ref=0.5, exponents=range(2, 9)):
    """Approach each singular line from below and check for blow-up.

    Returns one report per locus; ``diverges`` is set when |f| increases
    monotonically and by more than three orders of magnitude.
    """
    reports = []
    for var, where in f.singular_loci().items():
        dists = [10.0 ** -k for k in exponents]
        vals = []
        for d in dists:
            K, L = (where - d, L_ref) if var == "K" else (K_ref, where - d)
            vals.append(abs(evaluate(f, K, L)))
        mono = all(b > a for a, b in zip(vals, vals[1:]))
        reports.append(SingularityReport({var: where}, dists, vals,
                                         mono and vals[-1] > 1e3 * vals[0]))
    return reports


@dataclass
class InadaReport:
    positive_marginals: bool
    diminishing_returns: bool
    constant_returns: bool
    boundary_limits: bool
    fkk_sign_change: bool
    fll_sign_change: bool
    divergence: bool
    details: dict = field(default_factory=dict)

    @property
    def conditions(self):
        return {
            "positive_marginals": self.positive_marginals,
            "diminishing_returns": self.diminishing_returns,
            "constant_returns": self.constant_returns,
            "boundary_limits": self.boundary_limits,
        }

    @property
    def all_hold(self):
        return all(self.conditions.values())


def _limit_trends(f, K0, L0, var):
    """f_var should blow up as var -> 0+ and vanish as var -> infinity."""
    scales_lo = [10.0 ** -k for k in range(1, 7)]
    scales_hi = [10.0 ** k for k in range(1, 7)]

    def mp(s):
        K, L = (K0 * s, L0) if var == "K" else (K0, L0 * s)
        m = marginal_products(f, K, L)
        return m.mpk if var == "K" else m.mpl

    lo = [mp(s) for s in scales_lo]
    hi = [mp(s) for s in scales_hi]
    to_inf = all(b > a for a, b in zip(lo, lo[1:])) and lo[-1] > 10 * abs(lo[0])
    to_zero = all(abs(b) < abs(a) for a, b in zip(hi, hi[1:])) and abs(hi[-1]) < 0.1 * abs(hi[0])
    return to_inf and to_zero, {"toward_zero": lo, "toward_infinity": hi}


def inada_probe(f: ProductionFunction, grid) -> InadaReport:
    """Sample the four Inada conditions on a tensor grid ``(K_values, L_values)``."""
    Ks, Ls = (np.asarray(g, dtype=float) for g in grid)
    fk, fl, fkk, fll, crs = [], [], [], [], []
    divergence = False
    for K in Ks:
        for L in Ls:
            try:
                m = marginal_products(f, K, L)
                skk, sll = second_partials(f, K, L)
                crs.append(abs(returns_to_scale_probe(f, K, L, 2.0) - 1.0))
            except SingularityError:
                divergence = True
                continue
            fk.append(m.mpk)
            fl.append(m.mpl)
            fkk.append(skk)
            fll.append(sll)
    fk, fl, fkk, fll = map(np.asarray, (fk, fl, fkk, fll))
    if f.singular_loci():
        divergence = divergence or any(r.diverges for r in singularity_probe(f))
    K0, L0 = float(np.median(Ks)), float(np.median(Ls))
    try:
        k_ok, k_det = _limit_trends(f, K0, L0, "K")
        l_ok, l_det = _limit_trends(f, K0, L0, "L")
    except SingularityError:
        k_ok = l_ok = False
        k_det = l_det = {}
    return InadaReport(
        positive_marginals=bool(fk.size and np.all(fk > 0) and np.all(fl > 0)),
        diminishing_returns=bool(fkk.size and np.all(fkk < 0) and np.all(fll < 0)),
        constant_returns=bool(crs and max(crs) < 1e-8),
        boundary_limits=bool(k_ok and l_ok),
        fkk_sign_change=bool(fkk.size and fkk.min() < 0 < fkk.max()),
        fll_sign_change=bool(fll.size and fll.min() < 0 < fll.max()),
        divergence=divergence,
        details={"K_limits": k_det, "L_limits": l_det},
    )


def f5_isoquant_labor(f: LogisticBoth, level, K):
    """Labor input that puts (K, L) on the f5 isoquant ``level`` inside D'."""
    if not 0 < level < f.Nf:
        raise DomainError("isoquant level must lie in (0, Nf)")
    K = np.asarray(K, dtype=float)
    if np.any((K <= 0) | (K >= f.NK)):
        raise DomainError("K must lie in (0, NK)")
    # Nf / (1 + C e^{-s}) = level  with  s = alpha logit(K/NK) + beta logit(L/NL)
    s = -math.log((f.Nf / level - 1.0) / f.C)
    v = (s - f.alpha * np.log(K / (f.NK - K))) / f.beta
    return f.NL / (1.0 + np.exp(-v))


# ---------------------------------------------------------------------------
# elasticity of substitution along logistic factor paths


SIGMA1_VARIANTS = {
    "reported": _kernels.SIGMA1_REPORTED,
    "printed": _kernels.SIGMA1_PRINTED,
    "capacity": _kernels.SIGMA1_CAPACITY,
}


@dataclass(frozen=True)
class Sigma1Params:
    """Initial-condition constants, logistic rates and capacities of K(t), L(t)."""

    C1: float
    a: float
    C2: float
    b: float
    NK: float = 150.0
    NL: float = 150.0

    def __post_init__(self):
        if min(self.C1, self.a, self.C2, self.b, self.NK, self.NL) <= 0:
            raise ValueError("all sigma1 parameters must be positive")


# fitted logistic factor paths for the 1947-2016 US nonfarm business data
US_SIGMA1_PARAMS = Sigma1Params(C1=0.203, a=0.129, C2=0.432, b=0.118, NK=150.0, NL=150.0)


def logistic_path(C0, rate, N, t):
    """``N C0 / (C0 + (N - C0) e^{-rate t})`` and its time derivative."""
    t = np.asarray(t, dtype=float)
    x = N * C0 / (C0 + (N - C0) * np.exp(-rate * t))
    return x, rate * x * (1.0 - x / N)


def sigma1(params: Sigma1Params, t, variant="reported"):
    """Elasticity of substitution along the logistic paths K(t), L(t).

    ``variant`` selects the denominator:

    * ``"reported"`` - ``g - K'/(K-1) + L'/(L-1)``, which gives the
      reference 1947-2016 range (about -0.0152 to 0.498);
    * ``"printed"`` - ``g - K'/(K-1) - L'/(L-1)``;
    * ``"capacity"`` - ``g - K'/(K-NK) - L'/(L-NL)``;

    with ``g = L'/L - K'/K`` the numerator.  Denominators are cleared before
    dividing, so a path crossing 1 gives the limit value 0 instead of a
    pole.  Raises :class:`PoleError` when any requested time hits a zero of
    the cleared denominator.
    """
    try:
        code = SIGMA1_VARIANTS[variant]
    except KeyError:
        raise ValueError(f"unknown sigma1 variant {variant!r}") from None
    if np.any(np.asarray(t) < 0):
        raise DomainError("sigma1 is defined for t >= 0")
    p = params
    out = _kernels.sigma1_kernel(t, p.C1, p.a, p.C2, p.b, p.NK, p.NL, code)[0]
    if np.any(np.isnan(out)):
        tt = np.broadcast_to(np.asarray(t, dtype=float), np.shape(out))
        raise PoleError("sigma1 evaluated at a pole", locus={"t": tt[np.isnan(out)].tolist()})
    return float(out) if np.ndim(out) == 0 else out
