"""Hot numeric kernels.

Each kernel exists twice: a vectorised numpy version (``*_np``) and an
explicit-loop version compiled with numba (``*_jit``).  The public names
(``f5_values`` etc.) point at the compiled loops when numba is importable and
the environment variable ``LOGIGROWTH_DISABLE_JIT`` is unset or ``0``;
otherwise they point at the numpy versions.  Both paths are kept importable
so tests and the benchmark can compare them in one process.
"""

import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

HAVE_NUMBA = numba is not None
JIT_ENABLED = HAVE_NUMBA and os.environ.get("LOGIGROWTH_DISABLE_JIT", "0") in ("", "0")

# sigma1 denominator variants, see production.sigma1
SIGMA1_REPORTED = 0
SIGMA1_PRINTED = 1
SIGMA1_CAPACITY = 2


def _njit(fn):
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, fastmath=False)(fn)


# ---------------------------------------------------------------------------
# logistic flow


def logistic_flow_np(x0, t, rate, capacity):
    x0 = np.asarray(x0, dtype=float)
    t = np.asarray(t, dtype=float)
    den = x0 + (capacity - x0) * np.exp(-rate * t)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0.0, capacity * x0 / den, np.nan)
    return out


def _logistic_flow_loop(x0, t, rate, capacity):
    n = x0.shape[0]
    out = np.empty(n)
    for i in range(n):
        den = x0[i] + (capacity - x0[i]) * math.exp(-rate * t[i])
        if den > 0.0:
            out[i] = capacity * x0[i] / den
        else:
            out[i] = np.nan
    return out


_logistic_flow_jit = _njit(_logistic_flow_loop)


def logistic_flow_jit(x0, t, rate, capacity):
    x0, t = np.broadcast_arrays(np.asarray(x0, dtype=float), np.asarray(t, dtype=float))
    shape = x0.shape
    out = _logistic_flow_jit(np.ascontiguousarray(x0).ravel(), np.ascontiguousarray(t).ravel(),
                             float(rate), float(capacity))
    return out.reshape(shape)


# ---------------------------------------------------------------------------
# f5 = Nf K^a L^b / (C |NK-K|^a |NL-L|^b + K^a L^b), evaluated as Nf / (1 + C r)
# so that index-scale and very large arguments do not overflow.


def f5_denominators_np(K, L, NK, NL, alpha, beta, C):
    K = np.asarray(K, dtype=float)
    L = np.asarray(L, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        r = (np.abs(NK - K) / K) ** alpha * (np.abs(NL - L) / L) ** beta
        return 1.0 + C * r


def f5_values_np(K, L, Nf, NK, NL, alpha, beta, C):
    den = f5_denominators_np(K, L, NK, NL, alpha, beta, C)
    with np.errstate(divide="ignore", invalid="ignore"):
        return Nf / den, den


def _f5_loop(K, L, Nf, NK, NL, alpha, beta, C):
    n = K.shape[0]
    out = np.empty(n)
    den = np.empty(n)
    for i in range(n):
        rk = abs(NK - K[i]) / K[i]
        rl = abs(NL - L[i]) / L[i]
        d = 1.0 + C * (rk ** alpha) * (rl ** beta)
        den[i] = d
        out[i] = Nf / d if d != 0.0 else np.inf
    return out, den


_f5_jit = _njit(_f5_loop)


def f5_values_jit(K, L, Nf, NK, NL, alpha, beta, C):
    K, L = np.broadcast_arrays(np.asarray(K, dtype=float), np.asarray(L, dtype=float))
    shape = K.shape
    out, den = _f5_jit(np.ascontiguousarray(K).ravel(), np.ascontiguousarray(L).ravel(),
                       float(Nf), float(NK), float(NL), float(alpha), float(beta), float(C))
    return out.reshape(shape), den.reshape(shape)


# ---------------------------------------------------------------------------
# brute-force profit maximisation on a tensor lattice


def profit_grid_argmax_np(Kg, Lg, Nf, NK, NL, alpha, beta, C, p0, p1, p2):
    KK, LL = np.meshgrid(Kg, Lg, indexing="ij")
    Y, _ = f5_values_np(KK, LL, Nf, NK, NL, alpha, beta, C)
    P = p0 * Y - p1 * KK - p2 * LL
    flat = int(np.argmax(P))
    i, j = divmod(flat, P.shape[1])
    return i, j, float(P[i, j])


def _profit_grid_loop(Kg, Lg, Nf, NK, NL, alpha, beta, C, p0, p1, p2):
    best = -np.inf
    bi = 0
    bj = 0
    for i in range(Kg.shape[0]):
        K = Kg[i]
        rk = (abs(NK - K) / K) ** alpha
        for j in range(Lg.shape[0]):
            L = Lg[j]
            d = 1.0 + C * rk * (abs(NL - L) / L) ** beta
            val = p0 * Nf / d - p1 * K - p2 * L
            if val > best:
                best = val
                bi = i
                bj = j
    return bi, bj, best


_profit_grid_jit = _njit(_profit_grid_loop)


def profit_grid_argmax_jit(Kg, Lg, Nf, NK, NL, alpha, beta, C, p0, p1, p2):
    i, j, best = _profit_grid_jit(np.ascontiguousarray(Kg, dtype=float),
                                  np.ascontiguousarray(Lg, dtype=float),
                                  float(Nf), float(NK), float(NL), float(alpha), float(beta),
                                  float(C), float(p0), float(p1), float(p2))
    return int(i), int(j), float(best)


# ---------------------------------------------------------------------------
# elasticity of substitution along logistic factor paths


def sigma1_np(t, C1, a, C2, b, NK, NL, variant):
    t = np.asarray(t, dtype=float)
    K = NK * C1 / (C1 + (NK - C1) * np.exp(-a * t))
    L = NL * C2 / (C2 + (NL - C2) * np.exp(-b * t))
    Kd = a * K * (1.0 - K / NK)
    Ld = b * L * (1.0 - L / NL)
    num = Ld / L - Kd / K
    if variant == SIGMA1_CAPACITY:
        pk, pl, sl = K - NK, L - NL, -1.0
    else:
        pk, pl = K - 1.0, L - 1.0
        sl = 1.0 if variant == SIGMA1_REPORTED else -1.0
    # denominators cleared, so K or L crossing the pole locus gives the limit 0
    top = num * pk * pl
    den = top - Kd * pl + sl * Ld * pk
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den == 0.0, np.nan, top / den)
        # a constant factor ratio has zero elasticity even where den vanishes too
        out = np.where(num == 0.0, 0.0, out)
    return out, K, L, Kd, Ld


def _sigma1_loop(t, C1, a, C2, b, NK, NL, variant):
    n = t.shape[0]
    out = np.empty(n)
    Ks = np.empty(n)
    Ls = np.empty(n)
    Kds = np.empty(n)
    Lds = np.empty(n)
    for i in range(n):
        K = NK * C1 / (C1 + (NK - C1) * math.exp(-a * t[i]))
        L = NL * C2 / (C2 + (NL - C2) * math.exp(-b * t[i]))
        Kd = a * K * (1.0 - K / NK)
        Ld = b * L * (1.0 - L / NL)
        num = Ld / L - Kd / K
        if variant == 0:
            pk = K - 1.0
            pl = L - 1.0
            sk = -1.0
            sl = 1.0
        elif variant == 1:
            pk = K - 1.0
            pl = L - 1.0
            sk = -1.0
            sl = -1.0
        else:
            pk = K - NK
            pl = L - NL
            sk = -1.0
            sl = -1.0
        top = num * pk * pl
        den = top + sk * Kd * pl + sl * Ld * pk
        if num == 0.0:
            out[i] = 0.0
        elif den == 0.0:
            out[i] = np.nan
        else:
            out[i] = top / den
        Ks[i] = K
        Ls[i] = L
        Kds[i] = Kd
        Lds[i] = Ld
    return out, Ks, Ls, Kds, Lds


_sigma1_jit = _njit(_sigma1_loop)


def sigma1_jit(t, C1, a, C2, b, NK, NL, variant):
    t = np.asarray(t, dtype=float)
    shape = t.shape
    res = _sigma1_jit(np.ascontiguousarray(t).ravel(), float(C1), float(a), float(C2), float(b),
                      float(NK), float(NL), int(variant))
    return tuple(r.reshape(shape) for r in res)


if JIT_ENABLED:
    logistic_flow = logistic_flow_jit
    f5_values = f5_values_jit
    profit_grid_argmax = profit_grid_argmax_jit
    sigma1_kernel = sigma1_jit
else:
    logistic_flow = logistic_flow_np
    f5_values = f5_values_np
    profit_grid_argmax = profit_grid_argmax_np
    sigma1_kernel = sigma1_np
