"""Least-squares calibration against annual (K, L, Y) index series.

The optimizer is a plain Levenberg-Marquardt loop with a finite-difference
Jacobian.  Steps are accepted only when they lower the sum of squared
residuals, so the recorded SSR history is monotone.  Fits are done in levels
for every family.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import DataError, DegenerateError, DomainError, FitError, LogiGrowthError, PoleError
from .production import CobbDouglas, LogisticBoth, Sigma1Params, evaluate, fd_step, sigma1


class KinkWarning(UserWarning):
    """Data reach a capacity, where the fitted function has a kink."""


@dataclass(frozen=True)
class EconSeries:
    """Annual index series; years strictly increasing, all values positive."""

    years: tuple
    K: tuple
    L: tuple
    Y: tuple

    def __post_init__(self):
        n = len(self.years)
        if not (len(self.K) == len(self.L) == len(self.Y) == n):
            raise DataError("years, K, L and Y must have equal lengths")
        if n == 0:
            raise DataError("empty series")
        yrs = np.asarray(self.years)
        if np.any(np.diff(yrs) <= 0):
            raise DataError("years must be strictly increasing")
        for name in ("K", "L", "Y"):
            v = np.asarray(getattr(self, name), dtype=float)
            if not np.all(np.isfinite(v)):
                raise DataError(f"{name} contains missing or non-finite values")
            if np.any(v <= 0):
                raise DataError(f"{name} must be strictly positive")

    @classmethod
    def from_arrays(cls, years, K, L, Y):
        return cls(tuple(int(y) for y in years), tuple(map(float, K)), tuple(map(float, L)),
                   tuple(map(float, Y)))

    def __len__(self):
        return len(self.years)

    def arrays(self):
        return (np.asarray(self.K, dtype=float), np.asarray(self.L, dtype=float),
                np.asarray(self.Y, dtype=float))

    @property
    def t(self):
        """Years re-indexed so the first year is 0."""
        return np.asarray(self.years, dtype=float) - self.years[0]


@dataclass(frozen=True)
class FitConfig:
    """Options for :func:`fit_f5` and :func:`fit_cobb_douglas`.

    ``free_capacities`` lists capacity names (``"Nf"``, ``"NK"``, ``"NL"``)
    to estimate instead of holding fixed.  ``initial`` overrides the
    multi-start grid with a single starting vector.
    """

    Nf: float = 120.0
    NK: float = 150.0
    NL: float = 150.0
    free_capacities: tuple = ()
    constant_share: bool = True
    free_beta: bool = False
    initial: tuple | None = None
    tol: float = 1e-10
    max_iter: int = 500

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        bad = set(self.free_capacities) - {"Nf", "NK", "NL"}
        if bad:
            raise ValueError(f"unknown capacities {sorted(bad)}")


@dataclass
class FitResult:
    family: str
    params: dict
    residuals: np.ndarray
    ssr: float
    adjusted_r2: float
    n_params: int
    iterations: int
    converged: bool
    history: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)
    starts: list = field(default_factory=list)

    def as_dict(self):
        return {"family": self.family, "params": dict(self.params), "ssr": self.ssr,
                "adjusted_r2": self.adjusted_r2, "n_params": self.n_params,
                "iterations": self.iterations, "converged": self.converged,
                "flags": dict(self.flags)}


# ---------------------------------------------------------------------------
# optimizer


@dataclass
class LMOutcome:
    x: np.ndarray
    ssr: float
    iterations: int
    converged: bool
    history: list
    message: str


def _fd_jacobian(fun, x, r0):
    J = np.empty((r0.size, x.size))
    for j in range(x.size):
        h = fd_step(x[j])
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        J[:, j] = (fun(xp) - fun(xm)) / (2 * h)
    return J


def _safe_residuals(fun, x):
    try:
        r = fun(x)
    except (LogiGrowthError, FloatingPointError, ZeroDivisionError):
        return None
    if not np.all(np.isfinite(r)):
        return None
    return r


def levenberg_marquardt(fun, x0, tol=1e-10, max_iter=500) -> LMOutcome:
    """Minimize ``sum(fun(x)**2)``.

    Converges when an accepted step lowers the SSR by less than ``tol``
    relative, when the SSR hits zero, or when no damping level yields a
    decrease (a minimum to working precision).
    """
    x = np.asarray(x0, dtype=float).copy()
    r = _safe_residuals(fun, x)
    if r is None:
        raise FitError("residuals undefined at the starting point")
    ssr = float(r @ r)
    history = [ssr]
    lam = 1e-3
    for it in range(1, max_iter + 1):
        if ssr == 0.0:
            return LMOutcome(x, ssr, it - 1, True, history, "exact fit")
        J = _fd_jacobian(fun, x, r)
        A = J.T @ J
        g = J.T @ r
        accepted = False
        while lam < 1e16:
            D = np.diag(np.diag(A)) + 1e-12 * np.eye(x.size)
            try:
                step = -np.linalg.solve(A + lam * D, g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            xn = x + step
            rn = _safe_residuals(fun, xn)
            if rn is not None:
                sn = float(rn @ rn)
                if sn < ssr:
                    accepted = True
                    break
            lam *= 10
        if not accepted:
            return LMOutcome(x, ssr, it, True, history, "no further decrease possible")
        decrease = ssr - sn
        x, r, ssr = xn, rn, sn
        history.append(ssr)
        lam = max(lam / 10, 1e-12)
        if decrease <= tol * (ssr + decrease):
            return LMOutcome(x, ssr, it, True, history, "relative decrease below tolerance")
    return LMOutcome(x, ssr, max_iter, False, history, "iteration limit reached")


# ---------------------------------------------------------------------------
# goodness of fit


def adjusted_r2(residuals, Y, p) -> float:
    """``1 - (SSR/SST) (n-1)/(n-p-1)`` with SST about the mean of ``Y``."""
    r = np.asarray(residuals, dtype=float)
    Y = np.asarray(Y, dtype=float)
    n = Y.size
    if not n > p + 1:
        raise DomainError("need more observations than free parameters plus one")
    sst = float(np.sum((Y - Y.mean()) ** 2))
    if sst == 0.0:
        raise DegenerateError("output has zero variance; R^2 undefined")
    ssr = float(r @ r)
    return 1.0 - (ssr / sst) * (n - 1) / (n - p - 1)


# ---------------------------------------------------------------------------
# f5


def _f5_layout(config: FitConfig):
    names = ["C", "alpha"]
    if not config.constant_share:
        names.append("beta")
    names += list(config.free_capacities)
    return names


def _f5_from_vector(names, x, config):
    d = dict(zip(names, x))
    beta = d.get("beta", 1.0 - d["alpha"])
    return LogisticBoth(d.get("Nf", config.Nf), d.get("NK", config.NK), d.get("NL", config.NL),
                        d["alpha"], beta, d["C"])


def fit_f5(series: EconSeries, config: FitConfig = FitConfig()) -> FitResult:
    """Least-squares fit of f5 in levels with a 5 x 5 multi-start over (C, alpha).

    Returns the start with the lowest SSR (ties go to the earlier start in
    grid order).  Warns with :class:`KinkWarning` when the data reach a
    fixed capacity.
    """
    K, L, Y = series.arrays()
    names = _f5_layout(config)
    p = len(names)
    if len(series) < p + 2:
        raise DomainError(f"need at least {p + 2} observations for {p} free parameters")
    flags = {}
    if (np.any(K >= config.NK) and "NK" not in config.free_capacities) or \
       (np.any(L >= config.NL) and "NL" not in config.free_capacities) or \
       (np.any(Y >= config.Nf) and "Nf" not in config.free_capacities):
        flags["kink"] = True
        warnings.warn("series reaches a capacity; absolute values are used as they stand",
                      KinkWarning, stacklevel=2)

    def fun(x):
        f = _f5_from_vector(names, x, config)
        return evaluate(f, K, L) - Y

    if config.initial is not None:
        starts = [np.asarray(config.initial, dtype=float)]
    else:
        starts = []
        for C0 in np.linspace(0.05, 2.0, 5):
            for a0 in np.linspace(0.05, 0.95, 5):
                x0 = [C0, a0]
                if not config.constant_share:
                    x0.append(1.0 - a0)
                x0 += [getattr(config, n) for n in config.free_capacities]
                starts.append(np.array(x0))

    best = None
    diagnostics = []
    for x0 in starts:
        try:
            out = levenberg_marquardt(fun, x0, config.tol, config.max_iter)
        except FitError as exc:
            diagnostics.append({"start": x0.tolist(), "error": str(exc)})
            continue
        diagnostics.append({"start": x0.tolist(), "ssr": out.ssr, "converged": out.converged,
                            "iterations": out.iterations})
        if out.converged and (best is None or out.ssr < best.ssr):
            best = out
    if best is None:
        raise FitError("no start converged", trace=diagnostics)

    f = _f5_from_vector(names, best.x, config)
    resid = evaluate(f, K, L) - Y
    params = dict(zip(names, map(float, best.x)))
    params["beta"] = float(f.beta)
    params.update({"Nf": f.Nf, "NK": f.NK, "NL": f.NL})
    flags["adjusted_r2_p_plus_1"] = adjusted_r2(resid, Y, p + 1) if len(Y) > p + 2 else None
    return FitResult("f5", params, resid, float(resid @ resid), adjusted_r2(resid, Y, p), p,
                     best.iterations, best.converged, best.history, flags, diagnostics)


# ---------------------------------------------------------------------------
# Cobb-Douglas


def fit_cobb_douglas(series: EconSeries, config: FitConfig = FitConfig()) -> FitResult:
    """Least-squares fit of ``A K^alpha L^beta`` in levels.

    The start comes from ordinary least squares on logs.  ``beta = 1 - alpha``
    unless ``config.free_beta`` is set.  A negative exponent sets the
    ``inadmissible`` flag.
    """
    K, L, Y = series.arrays()
    p = 3 if config.free_beta else 2
    if len(series) < p + 2:
        raise DomainError(f"need at least {p + 2} observations for {p} free parameters")
    lk, ll, ly = np.log(K), np.log(L), np.log(Y)
    if config.free_beta:
        X = np.column_stack([np.ones_like(lk), lk, ll])
        coef = np.linalg.lstsq(X, ly, rcond=None)[0]
        x0 = np.array([math.exp(coef[0]), coef[1], coef[2]])
    else:
        X = np.column_stack([np.ones_like(lk), lk - ll])
        coef = np.linalg.lstsq(X, ly - ll, rcond=None)[0]
        x0 = np.array([math.exp(coef[0]), coef[1]])
    if config.initial is not None:
        x0 = np.asarray(config.initial, dtype=float)

    def unpack(x):
        return x[0], x[1], (x[2] if config.free_beta else 1.0 - x[1])

    def fun(x):
        A, a, b = unpack(x)
        return A * K ** a * L ** b - Y

    out = levenberg_marquardt(fun, x0, config.tol, config.max_iter)
    if not out.converged:
        raise FitError("Cobb-Douglas fit did not converge", trace=out.history)
    A, a, b = unpack(out.x)
    resid = fun(out.x)
    flags = {"inadmissible": bool(a < 0 or b < 0), "log_ols_start": x0.tolist()}
    return FitResult("cobb-douglas", {"A": float(A), "alpha": float(a), "beta": float(b)},
                     resid, float(resid @ resid), adjusted_r2(resid, Y, p), p, out.iterations,
                     out.converged, out.history, flags)


# ---------------------------------------------------------------------------
# logistic factor paths


@dataclass
class LogisticPathFit:
    C0: float          # initial-condition constant (value at t = 0)
    rate: float
    capacity: float
    ssr: float
    degenerate: bool
    converged: bool


def logistic_path_values(C0, rate, capacity, t):
    t = np.asarray(t, dtype=float)
    return capacity * C0 / (C0 + (capacity - C0) * np.exp(-rate * t))


def fit_logistic_path(t, values, capacity=None, tol=1e-12, max_iter=500) -> LogisticPathFit:
    """Fit ``N C0 / (C0 + (N - C0) e^{-a t})`` to a series.

    ``capacity`` fixes ``N``; when omitted ``N`` is estimated too.  A constant
    series returns ``rate = 0`` flagged as degenerate.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(values, dtype=float)
    if np.any(v <= 0):
        raise DomainError("values must be positive")
    if np.ptp(v) <= 1e-12 * abs(v.mean()):
        return LogisticPathFit(float(v[0]), 0.0, float(capacity or v[0]), 0.0, True, True)
    N0 = capacity if capacity is not None else 1.5 * v.max()
    # rate start from the slope of the logit against time
    z = np.log(v / np.clip(N0 - v, 1e-12 * N0, None))
    a0 = max(np.polyfit(t, z, 1)[0], 1e-3)
    x0 = [v[0], a0] + ([] if capacity is not None else [N0])

    def fun(x):
        N = capacity if capacity is not None else x[2]
        if x[0] <= 0 or N <= 0:
            raise DomainError("nonpositive logistic parameters")
        return logistic_path_values(x[0], x[1], N, t) - v

    out = levenberg_marquardt(fun, x0, tol, max_iter)
    if not out.converged:
        raise FitError("logistic path fit did not converge", trace=out.history)
    N = capacity if capacity is not None else out.x[2]
    return LogisticPathFit(float(out.x[0]), float(out.x[1]), float(N), out.ssr,
                           bool(abs(out.x[1]) < 1e-8), out.converged)


# ---------------------------------------------------------------------------
# sigma1 series


@dataclass
class Sigma1Series:
    years: np.ndarray
    values: np.ndarray          # NaN at pole years
    min: float
    max: float
    argmin_year: int
    argmax_year: int
    sign_changes: list          # (year_before, year_after, root_t)
    poles: list                 # years where the expression has a pole

    def as_rows(self):
        return [(int(y), float(v)) for y, v in zip(self.years, self.values)]


def sigma1_series(params: Sigma1Params, years, variant="reported") -> Sigma1Series:
    """σ1 along the logistic factor paths with ``t = year - first year``."""
    years = np.asarray(years, dtype=int)
    t = (years - years[0]).astype(float)
    vals = np.empty(t.size)
    poles = []
    for i, ti in enumerate(t):
        try:
            vals[i] = sigma1(params, ti, variant)
        except PoleError:
            vals[i] = np.nan
            poles.append(int(years[i]))
    finite = np.isfinite(vals)
    if not finite.any():
        raise PoleError("every year is a pole")
    idx = np.flatnonzero(finite)
    imin = idx[np.argmin(vals[finite])]
    imax = idx[np.argmax(vals[finite])]

    def g(x):
        return sigma1(params, x, variant)

    changes = []
    for i in range(t.size - 1):
        a, b = vals[i], vals[i + 1]
        if np.isfinite(a) and np.isfinite(b) and a * b < 0:
            try:
                root = brentq(g, t[i], t[i + 1], xtol=1e-12)
            except (ValueError, PoleError):
                root = math.nan
            changes.append((int(years[i]), int(years[i + 1]), float(root)))
    return Sigma1Series(years, vals, float(vals[imin]), float(vals[imax]), int(years[imin]),
                        int(years[imax]), changes, poles)
