"""Command-line driver for the fgnlab experiments.

Every run writes its table (CSV or JSON) and an INI manifest of the fully
resolved parameters into the output directory.  The manifest is itself a
valid ``--config`` file, so ``fgnlab --config <manifest>`` repeats the run.

Exit status: 0 success, 2 invalid parameters, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from ._io import Table
from .errors import NumericalFailure, ValidationError

OUT_ENV = "FGNLAB_OUT"

COMMANDS = ("cov", "spectral", "toeplitz-bench", "claim1", "claim2", "cllt", "sample-check", "mlf", "occupation")

# resolved defaults per command; keys are flag names with underscores
DEFAULTS = {
    "cov": {"h": 0.8, "t_max": 64},
    "spectral": {"h": 0.8, "n": 512, "modes": 200},
    "toeplitz-bench": {"h": 0.8, "k_grid": "64:2048", "n": 4, "m_scale": 1.0},
    "claim1": {"h": 0.85, "n": 4, "k_grid": "32:4096"},
    "claim2": {"h": 0.85, "n": 4, "k_grid": "64:4096", "reps": 1000, "seed": 0},
    "cllt": {"h": 0.85, "n_grid": "64,1024", "a": 0.0, "b": 1.0, "kappa": 0.0, "k": 4096, "reps": 1000, "seed": 0},
    "sample-check": {"h": 0.8, "n": 64, "reps": 10000, "seed": 0, "max_lag": 8},
    "mlf": {"h": 0.8, "count": 1000000, "seed": 0},
    "occupation": {"h": 0.8, "n_grid": "1024:65536", "a": 0.0, "b": 1.0, "epsilon": None, "reps": 1000,
                   "seed": 0, "v": "expneg,capM,bump,const1", "cap_m": 10.0, "phi_theta": 0.0,
                   "dn_grid": "1:256", "mlf_count": 1000000},
}

_TYPES = {"h": float, "n": int, "k": int, "t_max": int, "modes": int, "a": float, "b": float, "epsilon": float,
          "reps": int, "seed": int, "kappa": float, "max_lag": int, "count": int, "cap_m": float,
          "phi_theta": float, "m_scale": float, "mlf_count": int, "workers": int,
          "k_grid": str, "n_grid": str, "dn_grid": str, "v": str}


def parse_grid(text) -> list[int]:
    """``"32:4096"`` (doubling), ``"2^5..2^12"`` or a comma list ``"1,4,16"``."""
    s = str(text).replace(" ", "")
    if ".." in s or ":" in s:
        lo, hi = s.split(".." if ".." in s else ":")
        lo, hi = _int_expr(lo), _int_expr(hi)
        if lo < 1 or hi < lo:
            raise ValidationError(f"bad grid range {text!r}")
        out = []
        v = lo
        while v <= hi:
            out.append(v)
            v *= 2
        return out
    vals = [_int_expr(p) for p in s.split(",") if p]
    if not vals:
        raise ValidationError(f"empty grid {text!r}")
    return vals


def _int_expr(s: str) -> int:
    try:
        if "^" in s:
            base, ex = s.split("^")
            return int(base) ** int(ex)
        return int(s)
    except ValueError as exc:
        raise ValidationError(f"not an integer: {s!r}") from exc


# --------------------------------------------------------------------------
# commands; each takes the resolved parameter dict and returns (Table, extra)


def _cmd_cov(p, workers):
    from .fgn_model import covariance_seq

    seq = covariance_seq(p["h"], p["t_max"])
    return Table(["t", "b_t"], enumerate(seq.values), meta={"h": p["h"]}), {}


def _cmd_spectral(p, workers):
    from .fgn_model import analytic_spectral_constant, spectral_density, spectral_minimum, spectral_params

    par = spectral_params(p["h"], p["modes"])
    lam = (np.arange(1, p["n"] + 1) - 0.5) / (2.0 * p["n"])
    meta = {"h": p["h"], "modes": p["modes"], "normalization_c": par.normalization_c,
            "analytic_c": analytic_spectral_constant(p["h"]), "grid_minimum": spectral_minimum(par)}
    return Table(["lambda", "f"], zip(lam, spectral_density(par, lam)), meta=meta), {}


def _cmd_toeplitz_bench(p, workers):
    from .fgn_model import HurstParam, b_vector, spectral_minimum, spectral_params
    from .toeplitz import NeumannConfig, SymmetricToeplitz, eigen_extremes, levinson_solve, neumann_quadratic_form

    hp = HurstParam(p["h"])
    fmin = spectral_minimum(spectral_params(hp)) if not hp.brownian else 1.0
    table = Table(["k", "lambda_min", "lambda_max", "qform_levinson", "qform_neumann_opt", "terms_opt",
                   "qform_neumann_ck", "terms_ck", "rel_diff"],
                  meta={"h": hp.h, "n": p["n"], "m_scale": p["m_scale"], "spectral_grid_min": fmin})
    timings = {}
    for k in parse_grid(p["k_grid"]):
        T = SymmetricToeplitz.fgn(hp, k)
        B = b_vector(hp, p["n"], k)
        t0 = time.perf_counter()
        ext = eigen_extremes(T)
        t1 = time.perf_counter()
        lev = float(B @ levinson_solve(T, B))
        t2 = time.perf_counter()
        opt = neumann_quadratic_form(T, B, NeumannConfig(), ext)
        t3 = time.perf_counter()
        try:
            ck = neumann_quadratic_form(T, B, NeumannConfig(m_scale=p["m_scale"], hurst=hp.h), ext)
            ck_val, ck_terms = ck.value, ck.terms_used
        except NumericalFailure:
            ck_val, ck_terms = math.nan, 0
        t4 = time.perf_counter()
        scale = max(abs(lev), 1e-300)
        rel = max(abs(opt.value - lev), abs(ck_val - lev) if not math.isnan(ck_val) else 0.0) / scale
        table.append([k, ext.lambda_min, ext.lambda_max, lev, opt.value, opt.terms_used, ck_val, ck_terms, rel])
        timings[f"k{k}"] = (f"eig={t1 - t0:.3f}s levinson={t2 - t1:.3f}s "
                            f"neumann_opt={t3 - t2:.3f}s neumann_ck={t4 - t3:.3f}s")
    return table, {"timings": timings}


def _cmd_claim1(p, workers):
    from .conditional import quadratic_form_decay

    return quadratic_form_decay(p["h"], p["n"], parse_grid(p["k_grid"])), {}


def _cmd_claim2(p, workers):
    from .conditional import conditional_mean_vanishing
    from .sampler import RngSeed

    return conditional_mean_vanishing(p["h"], p["n"], parse_grid(p["k_grid"]), p["reps"], RngSeed(p["seed"]),
                                      workers=workers), {}


def _cmd_cllt(p, workers):
    from .conditional import cllt_check
    from .sampler import RngSeed

    return cllt_check(p["h"], parse_grid(p["n_grid"]), (p["a"], p["b"]), p["kappa"], k=p["k"], reps=p["reps"],
                      seed=RngSeed(p["seed"]), workers=workers), {}


def _cmd_sample_check(p, workers):
    from scipy import stats

    from .fgn_model import autocovariance
    from .mittag_leffler import ks_critical_value, ks_distance
    from .sampler import CHOLESKY_CAP, RngSeed, sample_cholesky_batch, sample_circulant_batch

    h, n, reps, L = p["h"], p["n"], p["reps"], p["max_lag"]
    if not 0 <= L < n:
        raise ValidationError("max_lag must lie in [0, n)")
    if reps < 2:
        raise ValidationError("reps must be >= 2")
    if n > CHOLESKY_CAP:
        raise ValidationError(f"sample-check compares against Cholesky, which is capped at n={CHOLESKY_CAP}")
    x = sample_circulant_batch(h, n, RngSeed(p["seed"]), reps)
    table = Table(["lag", "b_t", "sample_cov", "se", "z"])
    for t in range(L + 1):
        prod = (x[:, : n - t] * x[:, t:]).mean(axis=1)
        est = float(prod.mean())
        se = float(prod.std(ddof=1) / math.sqrt(reps))
        bt = float(autocovariance(h, t))
        table.append([t, bt, est, se, (est - bt) / se])
    # independent streams for the Cholesky side
    y = sample_cholesky_batch(h, n, RngSeed(p["seed"], 2**32), reps)
    sa, sb = x.sum(axis=1), y.sum(axis=1)
    ks = ks_distance(sa, sb)
    table.meta.update({"h": h, "n": n, "reps": reps, "seed": p["seed"], "ks_sn": ks,
                       "ks_critical_1e-3": ks_critical_value(reps, reps),
                       "ks_pvalue": float(stats.ks_2samp(sa, sb).pvalue)})
    return table, {}


def _cmd_mlf(p, workers):
    from .mittag_leffler import MlfIndex, moment, reference_cdf, sample
    from .sampler import RngSeed

    idx = MlfIndex.from_hurst(p["h"])
    ref = reference_cdf(idx, p["count"], RngSeed(p["seed"]))
    smp = sample(idx, p["count"], RngSeed(p["seed"]))
    meta = {"alpha": idx.alpha, "count": p["count"], "seed": p["seed"], "dkw_epsilon": ref.dkw_epsilon}
    for q in (1, 2, 3):
        meta[f"moment{q}_exact"] = moment(idx, q)
        meta[f"moment{q}_sample"] = float(np.mean(smp.values**q))
        meta[f"moment{q}_se"] = smp.standard_error(q)
    return Table(["y", "F(y)"], zip(ref.y, ref.cdf), meta=meta), {}


def _cmd_occupation(p, workers):
    from .conditional import build_dn_table
    from .occupation import OccupationConfig, compare_to_mlf, return_sequence
    from .sampler import RngSeed

    n_grid = parse_grid(p["n_grid"])
    v_ids = tuple(v for v in str(p["v"]).split(",") if v)
    cfg = OccupationConfig(p["h"], n_grid[0], (p["a"], p["b"]), p["epsilon"], p["reps"], v_ids[0], p["cap_m"],
                           RngSeed(p["seed"]), p["phi_theta"])
    dn = build_dn_table(cfg.h, parse_grid(p["dn_grid"]))
    rs = return_sequence(cfg.h, max(n_grid), dn)
    table = compare_to_mlf(cfg, rs, n_grid, v_ids, mlf_count=p["mlf_count"], workers=workers)
    return table, {}


_HANDLERS = {
    "cov": _cmd_cov,
    "spectral": _cmd_spectral,
    "toeplitz-bench": _cmd_toeplitz_bench,
    "claim1": _cmd_claim1,
    "claim2": _cmd_claim2,
    "cllt": _cmd_cllt,
    "sample-check": _cmd_sample_check,
    "mlf": _cmd_mlf,
    "occupation": _cmd_occupation,
}


# --------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a flag given before the subcommand from being reset by it
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = common.add_argument_group("parameters (unset flags fall back to --config, then defaults)")
    for flag in ("h", "n", "k", "k-grid", "n-grid", "a", "b", "epsilon", "reps", "seed", "v", "t-max", "kappa",
                 "count", "cap-m", "phi-theta", "m-scale", "max-lag", "modes", "dn-grid", "mlf-count"):
        g.add_argument(f"--{flag}")
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV} or .)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--workers", type=int)
    common.add_argument("--config", help="INI file of parameters; flags win")

    parser = argparse.ArgumentParser(prog="fgnlab", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=f"run the {name} study")
    return parser


def _read_config(path):
    cp = configparser.ConfigParser(interpolation=None)
    if not cp.read(path):
        raise ValidationError(f"cannot read config file {path!r}")
    out = {}
    for section in ("run", "params"):
        if cp.has_section(section):
            out.update({k.replace("-", "_"): v for k, v in cp.items(section)})
    out.update({k.replace("-", "_"): v for k, v in cp.defaults().items()})
    return out


def _coerce(key, val):
    if val is None or (isinstance(val, str) and val.lower() in ("", "none")):
        return None
    typ = _TYPES.get(key, str)
    try:
        if typ is int:
            return _int_expr(str(val))
        return typ(val)
    except ValueError as exc:
        raise ValidationError(f"--{key.replace('_', '-')}: cannot parse {val!r}") from exc


def resolve(args) -> tuple[str, dict, dict]:
    """Merge defaults, config file and flags; returns (command, params, run options)."""
    flags = {k: v for k, v in vars(args).items() if v is not None}
    cfg = _read_config(flags["config"]) if "config" in flags else {}
    command = flags.get("command") or cfg.get("command")
    if command not in COMMANDS:
        raise ValidationError(f"unknown or missing command {command!r}; choose from {', '.join(COMMANDS)}")
    params = dict(DEFAULTS[command])
    for key in params:
        if key in cfg:
            params[key] = cfg[key]
        if key in flags:
            params[key] = flags[key]
    unused = [k for k in flags if k not in params and k not in ("command", "out", "format", "workers", "config")]
    if unused:
        raise ValidationError(f"{command} does not take {', '.join('--' + u.replace('_', '-') for u in unused)}")
    params = {k: _coerce(k, v) for k, v in params.items()}
    opts = {"out": flags.get("out", cfg.get("out", os.environ.get(OUT_ENV, "."))),
            "format": flags.get("format", cfg.get("format", "csv")),
            "workers": int(flags.get("workers", cfg.get("workers", 1)))}
    if opts["format"] not in ("csv", "json"):
        raise ValidationError("format must be csv or json")
    if opts["workers"] < 1:
        raise ValidationError("workers must be >= 1")
    return command, params, opts


def _regime_warning(params) -> str | None:
    h = params.get("h")
    if h is not None and h <= 0.75:
        return "outside theorem regime H <= 3/4"
    return None


def write_manifest(path, command, params, opts, extra) -> None:
    cp = configparser.ConfigParser(interpolation=None)
    cp["run"] = {"command": command, "format": opts["format"]}
    cp["params"] = {k: ("none" if v is None else str(v)) for k, v in params.items()}
    info = {"version": __version__, "seed": str(params.get("seed", "none")), "workers": str(opts["workers"])}
    warn = _regime_warning(params)
    if warn:
        info["warning"] = warn
    cp["info"] = info
    for section, vals in extra.items():
        cp[section] = {k: str(v) for k, v in vals.items()}
    with open(path, "w") as fh:
        cp.write(fh)


def run(command: str, params: dict, opts: dict) -> Path:
    """Run one study and write ``<command>.<format>`` plus its manifest; returns the table path."""
    outdir = Path(opts["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    table, extra = _HANDLERS[command](params, opts["workers"])
    warn = _regime_warning(params)
    if warn:
        print(f"warning: {warn}", file=sys.stderr)
    path = outdir / f"{command}.{opts['format']}"
    (table.to_csv if opts["format"] == "csv" else table.to_json)(str(path))
    write_manifest(outdir / f"{command}.manifest.ini", command, params, opts, extra)
    return path


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        command, params, opts = resolve(args)
        path = run(command, params, opts)
    except ValidationError as exc:
        print(f"fgnlab: invalid parameters: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"fgnlab: numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return 3
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
