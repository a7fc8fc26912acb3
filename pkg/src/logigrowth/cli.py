"""Command-line front end.

Every subcommand resolves its configuration from built-in defaults, then an
optional flat JSON file (``--config``), then ``--param key=value`` pairs.
Unknown keys are rejected.  Reports embed the tool version and the resolved
configuration, and are written with sorted keys so repeated runs are
byte-identical.

Exit codes: 0 success, 2 usage, 3 data, 4 domain or singularity,
5 convergence, 6 a requested check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from . import __version__
from .calibrate import EconSeries, FitConfig, KinkWarning, fit_cobb_douglas, fit_f5, sigma1_series
from .errors import ConvergenceError, DataError, DomainError, LogiGrowthError, UnsupportedFamilyError
from .growth import GrowthLaw, GrowthModel, ShockSpec, shock_gap, shock_input, shock_response, \
    steady_state_limit
from .invariance import (Generator, WageShareFrame, characteristic_reconstruct,
                         distribution_integrability, holotheticity_residual, isoquant_points,
                         isoquant_preservation, logistic_output_rate, modified_wage_share,
                         wage_share)
from .production import FAMILIES, LogisticBoth, Sigma1Params, evaluate, make
from .profit import MarketPrices, solve_foc

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_DOMAIN = 4
EXIT_CONVERGENCE = 5
EXIT_CHECK_FAILED = 6


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# ingestion


HEADER = ["year", "K", "L", "Y"]


def ingest(path) -> EconSeries:
    """Read a ``year,K,L,Y`` CSV into a validated, year-sorted series."""
    try:
        fh = open(path, newline="", encoding="utf-8-sig")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc.strerror}") from None
    rows = []
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("empty file", line=1) from None
        if [h.strip() for h in header] != HEADER:
            raise DataError(f"header must be {','.join(HEADER)}", line=1)
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise DataError(f"expected 4 fields, got {len(row)}", line=line)
            try:
                year = int(row[0])
                vals = [float(c) for c in row[1:]]
            except ValueError:
                raise DataError(f"malformed row {row!r}", line=line) from None
            for name, v in zip(HEADER[1:], vals):
                if not math.isfinite(v) or v <= 0:
                    raise DataError(f"{name} = {v!r} must be positive in year {year}", line=line)
            rows.append((year, *vals, line))
    if not rows:
        raise DataError("no data rows")
    rows.sort(key=lambda r: r[0])
    for prev, cur in zip(rows, rows[1:]):
        if prev[0] == cur[0]:
            raise DataError(f"duplicate year {cur[0]} (lines {prev[4]} and {cur[4]})", line=cur[4])
    years, K, L, Y, _ = zip(*rows)
    return EconSeries.from_arrays(years, K, L, Y)


# ---------------------------------------------------------------------------
# configuration


FAMILY_DEFAULTS = {
    "cobb-douglas": {"A": 1.0, "alpha": 0.5, "beta": 0.5},
    "f4": {"alpha1": 1.0, "alpha2": 1.0, "p": 1.5},
    "f5": {"Nf": 120.0, "NK": 113.0, "NL": 115.0, "alpha": 3.0, "beta": 3.0, "C": 1.18},
    "f6": {"Nf": 100.0, "Nx": 100.0, "alpha": 2.0, "C": 2.0},
    "f7": {"Nf": 120.0, "NK": 113.0, "alpha": 0.5, "beta": 0.5, "C": 1.0},
    "f8": {"Nf": 120.0, "NL": 115.0, "alpha": 0.5, "beta": 0.5, "C": 1.0},
    "f9": {"C3": 0.5, "C4": 1.0},
    "f10": {"C1": 1.0, "C2": 0.5, "C3": 0.5},
}

F5_FIT = {"Nf": 120.0, "NK": 150.0, "NL": 150.0, "alpha": 0.4063544, "beta": 0.5936456,
          "C": 0.3118901}

COMMAND_DEFAULTS = {
    "fit": lambda fam: {"Nf": 120.0, "NK": 150.0, "NL": 150.0, "constant_share": True,
                        "free_beta": fam == "cobb-douglas", "tol": 1e-10, "max_iter": 500},
    "eval": lambda fam: {**FAMILY_DEFAULTS[fam], "K_min": 1.0, "K_max": 150.0, "K_n": 150,
                         "L_min": 1.0, "L_max": 150.0, "L_n": 150, "K_values": None,
                         "L_values": None},
    "flow": lambda fam: {"kind_k": "logistic", "rate_k": 0.129, "capacity_k": 150.0,
                         "kind_l": "logistic", "rate_l": 0.118, "capacity_l": 150.0,
                         "K0": 10.0, "L0": 20.0, "t_max": 70.0, "n": 71},
    "shock": lambda fam: {"capacity_x": 100.0, "capacity_f": 100.0, "alpha": 2, "C": 2.0,
                          "C1": 0.5, "C2": 0.5, "rate": 0.1, "t1": 3.0, "n": 101},
    "profit": lambda fam: {**F5_FIT, "p0": 1.0, "p1": 0.5, "p2": 0.5, "K0": None, "L0": None},
    "check": lambda fam: {"a": 2.0, "b": 1.0, "c": 1.5, "Nf": 120.0, "NK": 113.0,
                          "NL": 115.0, "C": 1.18, "samples": 100, "seed": 0, "t": 0.5},
    "wage-share": lambda fam: {"curve": "power", "exponent": 0.6, "C3": 0.5, "C4": 1.0,
                               "x_min": 0.1, "x_max": 0.9, "n": 9},
    "sigma1": lambda fam: {"C1": 0.203, "a": 0.129, "C2": 0.432, "b": 0.118, "NK": 150.0,
                           "NL": 150.0, "first_year": 1947, "last_year": 2016,
                           "variant": "reported", "expect_min": None, "expect_max": None,
                           "tol": 1e-3},
}

DEFAULT_FAMILY = {"fit": "f5", "eval": "f5"}


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _is_flat(v):
    if isinstance(v, list):
        return not any(isinstance(x, (dict, list)) for x in v)
    return not isinstance(v, dict)


def resolve_config(command, family, config_path=None, overrides=()):
    if family is not None and family not in FAMILIES:
        raise UsageError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    fam = family or DEFAULT_FAMILY.get(command, "f5")
    if command == "fit" and fam not in ("f5", "cobb-douglas"):
        raise UsageError("fit supports the f5 and cobb-douglas families")
    cfg = dict(COMMAND_DEFAULTS[command](fam))
    layers = []
    if config_path:
        try:
            with open(config_path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config {config_path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {config_path} is not valid JSON: {exc}") from None
        if not isinstance(doc, dict) or not all(_is_flat(v) for v in doc.values()):
            raise UsageError("config must be a flat JSON object (scalars or lists of scalars)")
        layers.append(doc)
    pairs = {}
    for item in overrides:
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        pairs[k.strip()] = _parse_value(v.strip())
    layers.append(pairs)
    for layer in layers:
        unknown = sorted(set(layer) - set(cfg))
        if unknown:
            raise UsageError(f"unknown configuration keys for {command}: {unknown}")
        cfg.update(layer)
    cfg["family"] = fam
    return cfg


# ---------------------------------------------------------------------------
# subcommands; each returns (result dict, column names, rows, checks passed)


def _values(cfg, axis):
    given = cfg[f"{axis}_values"]
    if given is not None:
        if isinstance(given, str):
            given = [float(v) for v in given.split(",")]
        return np.asarray(given, dtype=float)
    return np.linspace(cfg[f"{axis}_min"], cfg[f"{axis}_max"], int(cfg[f"{axis}_n"]))


def cmd_fit(cfg, series):
    if series is None:
        raise UsageError("fit needs --input")
    fc = FitConfig(Nf=cfg["Nf"], NK=cfg["NK"], NL=cfg["NL"],
                   constant_share=bool(cfg["constant_share"]), free_beta=bool(cfg["free_beta"]),
                   tol=float(cfg["tol"]), max_iter=int(cfg["max_iter"]))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", KinkWarning)
        res = fit_f5(series, fc) if cfg["family"] == "f5" else fit_cobb_douglas(series, fc)
    out = res.as_dict()
    out["warnings"] = [str(w.message) for w in caught]
    K, L, Y = series.arrays()
    rows = [(y, k, l, yy, yy + r, r) for y, k, l, yy, r in
            zip(series.years, K, L, Y, res.residuals)]
    return out, ["year", "K", "L", "Y", "fitted", "residual"], rows, True


def cmd_eval(cfg, series):
    params = {k: cfg[k] for k in FAMILY_DEFAULTS[cfg["family"]]}
    f = make(cfg["family"], **params)
    Ks, Ls = _values(cfg, "K"), _values(cfg, "L")
    KK, LL = np.meshgrid(Ks, Ls, indexing="ij")
    if f.n_inputs == 1:
        vals = evaluate(f, Ks)
        rows = [(k, v) for k, v in zip(Ks, np.atleast_1d(vals))]
        return {"family": f.family, "points": len(rows)}, ["x", "Y"], rows, True
    Y = evaluate(f, KK, LL)
    rows = [(k, l, y) for k, l, y in zip(KK.ravel(), LL.ravel(), np.ravel(Y))]
    return {"family": f.family, "points": len(rows)}, ["K", "L", "Y"], rows, True


def _law(kind, rate, capacity):
    if kind == "exponential":
        return GrowthLaw.exponential(rate)
    if kind == "logistic":
        return GrowthLaw.logistic(rate, capacity)
    raise UsageError(f"unknown growth kind {kind!r}")


def cmd_flow(cfg, series):
    model = GrowthModel(_law(cfg["kind_k"], cfg["rate_k"], cfg["capacity_k"]),
                        _law(cfg["kind_l"], cfg["rate_l"], cfg["capacity_l"]))
    t = np.linspace(0.0, cfg["t_max"], int(cfg["n"]))
    K, L = model.flow(np.full_like(t, cfg["K0"]), np.full_like(t, cfg["L0"]), t)
    rows = list(zip(t, K, L))
    return {"regime": model.regime}, ["t", "K", "L"], rows, True


def cmd_shock(cfg, series):
    spec = ShockSpec(cfg["capacity_x"], cfg["capacity_f"], cfg["alpha"], cfg["C"], cfg["C1"],
                     cfg["C2"], cfg["rate"], cfg["t1"])
    lo, hi = spec.window
    n = int(cfg["n"])
    t = lo + (hi - lo) * (np.arange(1, n + 1) / (n + 1))
    x = shock_input(spec, t)
    y = shock_response(spec, t)
    gap = shock_gap(spec)
    result = {"window": [lo, hi], "gap": gap._asdict(), "steady_state": steady_state_limit(spec)}
    return result, ["t", "x", "y"], list(zip(t, x, y)), True


def cmd_profit(cfg, series):
    f = LogisticBoth(cfg["Nf"], cfg["NK"], cfg["NL"], cfg["alpha"], cfg["beta"], cfg["C"])
    prices = MarketPrices(cfg["p0"], cfg["p1"], cfg["p2"])
    init = None if cfg["K0"] is None or cfg["L0"] is None else (cfg["K0"], cfg["L0"])
    sol = solve_foc(prices, f, init)
    rows = [(i, k, l, g) for i, (k, l, g) in enumerate(sol.trace)]
    return sol.as_dict(), ["iteration", "K", "L", "gradient"], rows, sol.status == "max"


def cmd_check(cfg, series):
    a, b, c = cfg["a"], cfg["b"], cfg["c"]
    Nf, NK, NL, C = cfg["Nf"], cfg["NK"], cfg["NL"], cfg["C"]
    rng = np.random.default_rng(int(cfg["seed"]))
    n = int(cfg["samples"])
    f = LogisticBoth.from_rates(a, b, c, Nf, NK, NL, C)
    S = np.column_stack([rng.uniform(0.05, 0.95, n) * NK, rng.uniform(0.05, 0.95, n) * NL])
    checks = []
    hol = holotheticity_residual(Generator.logistic(a, b, NK, NL), f,
                                 logistic_output_rate(c, Nf), S)
    checks.append(("holotheticity", hol.max_residual, 1e-6))
    level = float(evaluate(f, 0.5 * NK, 0.5 * NL))
    Kq = np.linspace(0.3, 0.7, 5) * NK
    iso = isoquant_preservation(GrowthModel.logistic(a, b, NK, NL), f,
                                (Kq, isoquant_points(f, level, Kq)), cfg["t"])
    checks.append(("isoquant_preservation", iso.image_spread, 1e-6))
    S3 = np.column_stack([S, rng.uniform(0.05, 0.95, n) * Nf])
    br = distribution_integrability(Generator.logistic(1, 1, NK, NL, 1, Nf),
                                    Generator.logistic(a, b, NK, NL, c, Nf), S3)
    checks.append(("bracket_norm", br, 1e-5))
    ch = characteristic_reconstruct("logistic_pair", dict(a=a, b=b, c=c, NK=NK, NL=NL, Nf=Nf),
                                    (0.3 * NK, 0.4 * NL, 0.5 * Nf))
    checks.append(("invariant_drift", ch.drift, 1e-7))
    rows = [(name, val, tol, val <= tol) for name, val, tol in checks]
    ok = all(r[3] for r in rows)
    return {"all_passed": ok}, ["check", "value", "tolerance", "passed"], rows, ok


def cmd_wage_share(cfg, series):
    x = np.linspace(cfg["x_min"], cfg["x_max"], int(cfg["n"]))
    if cfg["curve"] == "power":
        p = cfg["exponent"]

        def curve(u):
            return u ** p
    elif cfg["curve"] == "f9":
        f9 = make("f9", C3=cfg["C3"], C4=cfg["C4"])

        def curve(u):
            return float(f9.intensive(u))
    else:
        raise UsageError(f"unknown curve {cfg['curve']!r}")
    rows = []
    for u in x:
        h = max(1e-6, 1e-8 * abs(u))
        yx = (curve(u + h) - curve(u - h)) / (2 * h)
        fr = WageShareFrame(float(u), float(curve(u)), float(yx))
        try:
            mod = modified_wage_share(fr)
        except DomainError:
            mod = None
        rows.append((u, fr.y, yx, wage_share(fr), mod))
    return {"curve": cfg["curve"]}, ["x", "y", "y_x", "s_L", "s_L_modified"], rows, True


def cmd_sigma1(cfg, series):
    params = Sigma1Params(cfg["C1"], cfg["a"], cfg["C2"], cfg["b"], cfg["NK"], cfg["NL"])
    years = np.arange(int(cfg["first_year"]), int(cfg["last_year"]) + 1)
    s = sigma1_series(params, years, cfg["variant"])
    result = {"min": s.min, "max": s.max, "argmin_year": s.argmin_year,
              "argmax_year": s.argmax_year, "sign_changes": s.sign_changes, "poles": s.poles}
    ok = True
    for key, val in (("expect_min", s.min), ("expect_max", s.max)):
        if cfg[key] is not None:
            passed = abs(val - cfg[key]) <= cfg["tol"]
            result[key + "_passed"] = passed
            ok = ok and passed
    rows = [(y, None if not math.isfinite(v) else v) for y, v in s.as_rows()]
    return result, ["year", "sigma1"], rows, ok


COMMANDS = {"fit": cmd_fit, "eval": cmd_eval, "flow": cmd_flow, "shock": cmd_shock,
            "profit": cmd_profit, "check": cmd_check, "wage-share": cmd_wage_share,
            "sigma1": cmd_sigma1}


# ---------------------------------------------------------------------------
# output


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    return v


def render(command, cfg, result, columns, rows, fmt):
    meta = {"tool": "logigrowth", "version": __version__, "command": command,
            "config": _plain(cfg)}
    if fmt == "json":
        doc = {**meta, "result": _plain(result), "columns": columns, "rows": _plain(rows)}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# {json.dumps(meta, sort_keys=True)}\n")
    buf.write(f"# {json.dumps({'result': _plain(result)}, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in _plain(rows):
        w.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def build_parser():
    p = argparse.ArgumentParser(prog="logigrowth",
                                description="Logistic-growth production functions toolkit")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--input", help="CSV with header year,K,L,Y")
        sp.add_argument("--output", help="output file (default: stdout)")
        sp.add_argument("--family", help="production family tag, e.g. f5 or cobb-douglas")
        sp.add_argument("--config", help="flat JSON configuration file")
        sp.add_argument("--format", choices=("csv", "json"), default="json")
        sp.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")
    return p


def _fail(code, exc, **extra):
    diag = {"error": type(exc).__name__, "message": str(exc), "exit_code": code, **extra}
    sys.stderr.write(json.dumps(_plain(diag), sort_keys=True) + "\n")
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args.command, args.family, args.config, args.param)
        series = ingest(args.input) if args.input else None
        cfg["input"] = args.input
        result, columns, rows, ok = COMMANDS[args.command](cfg, series)
        text = render(args.command, cfg, result, columns, rows, args.format)
    except UsageError as exc:
        return _fail(EXIT_USAGE, exc)
    except (UnsupportedFamilyError, TypeError, KeyError) as exc:
        return _fail(EXIT_USAGE, exc)
    except DataError as exc:
        return _fail(EXIT_DATA, exc, line=exc.line)
    except ConvergenceError as exc:
        return _fail(EXIT_CONVERGENCE, exc)
    except (DomainError, ValueError) as exc:
        return _fail(EXIT_DOMAIN, exc, locus=getattr(exc, "locus", None))
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
