"""Command-line interface: ``eval``, ``sweep``, ``verify`` and ``export``.

Exit codes: 0 success, 1 verification failure, 2 invalid parameter regime,
3 point outside the region of the requested expansion.

A ``--config FILE`` of ``key = value`` lines (keys as the long flags,
dashes or underscores) supplies defaults; explicit flags win.  The oracle
precision defaults to ``$WHITASYM_DIGITS`` (30 when unset).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

import mpmath
import numpy as np

from .api import FUNCTIONS, METHODS, choose_method, evaluate
from .coefficients import coefficient_table
from .geometry import PathError, RegionError, classify_region
from .oracle import OracleError
from .params import ParameterError, ParameterSet

EXIT_OK, EXIT_VERIFY, EXIT_REGIME, EXIT_REGION = 0, 1, 2, 3
SWEEP_COLUMNS = ("function", "z_re", "z_im", "value_re", "value_im", "log10_abs", "phase",
                 "oracle_re", "oracle_im", "rel_error", "log10_rel_error", "error_bound", "method", "status")


def default_digits() -> int:
    try:
        return int(os.environ.get("WHITASYM_DIGITS", "30"))
    except ValueError:
        return 30


@dataclass
class GridSpec:
    start: float = 1e-3
    stop: float = 10.0
    count: int = 200
    spacing: str = "log"

    def points(self) -> np.ndarray:
        if self.count < 2:
            raise ValueError("grid count must be at least 2")
        if self.spacing == "log":
            if self.start <= 0:
                raise ValueError("log grid needs start > 0")
            return np.geomspace(self.start, self.stop, self.count)
        if self.spacing == "linear":
            return np.linspace(self.start, self.stop, self.count)
        raise ValueError("spacing must be 'log' or 'linear'")


@dataclass
class SweepConfig:
    """Real-axis sweep; the defaults give the data behind the two error plots."""

    mu: float = 20.0
    kappa: float = 4.5
    n: int = 11
    r: int = 2
    m_airy: int = 3
    functions: tuple = ("M", "W")
    z_grid: GridSpec = field(default_factory=GridSpec)
    z_im: float = 0.0
    method: str = "lg"
    output: str = "-"
    format: str = "csv"
    digits: int = field(default_factory=default_digits)

    def validate(self) -> None:
        self.z_grid.points()
        if self.z_grid.spacing == "log" and self.z_im == 0.0 and self.z_grid.start <= 0:
            raise ValueError("real-axis sweeps need start > 0")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.format not in ("csv", "jsonl"):
            raise ValueError("format must be 'csv' or 'jsonl'")
        for f in self.functions:
            if f not in FUNCTIONS:
                raise ValueError(f"unknown function {f!r}")


# -- config file ------------------------------------------------------------------

def read_config(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _config_path(argv) -> str | None:
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _apply_config(parser: argparse.ArgumentParser, argv) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    cfg_path = _config_path(argv)
    command = next((tok for tok in argv if not tok.startswith("-")), None)
    choices = parser._subparsers._group_actions[0].choices
    if not cfg_path or command not in choices:
        return parser.parse_args(argv)
    sub = choices[command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in read_config(cfg_path).items():
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
        act = known[key]
        if isinstance(act, argparse._StoreTrueAction):
            defaults[key] = value.lower() in ("1", "true", "yes")
        else:
            defaults[key] = act.type(value) if act.type else value
            if act.choices is not None and defaults[key] not in act.choices:
                raise ValueError(f"config key {key!r}: {value!r} not in {list(act.choices)}")
        act.required = False
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


# -- eval -------------------------------------------------------------------------------

def _record(res, which, z, params) -> dict:
    rec = {
        "function": which,
        "z": [z.real, z.imag],
        "mu": params.mu,
        "kappa": params.kappa,
        "method": res.method,
        "log10_abs": res.log10_modulus,
        "phase": res.phase,
        "value": [res.value.real, res.value.imag],
        "error_bound": res.rel_error_bound,
    }
    if "delta_bound" in res.extras:
        rec["delta_bound"] = res.extras["delta_bound"]
    label = classify_region(z if z.imag >= 0 else z.conjugate(), params)
    rec["region"] = {"sector": label.sector, "in_Z1": label.in_Z1, "in_Z2": label.in_Z2,
                     "in_Z3": label.in_Z3, "distances": list(label.distances)}
    return rec


def cmd_eval(args) -> int:
    params = ParameterSet(args.mu, args.kappa, args.delta)
    z = complex(args.z_re, args.z_im)
    res = evaluate(args.function, z, params, args.method, args.n, args.r, args.m, args.digits)
    print(json.dumps(_record(res, args.function, z, params), indent=2))
    return EXIT_OK


# -- sweep ----------------------------------------------------------------------------------

def _sweep_row(which, z, params, cfg: SweepConfig, ctx) -> dict:
    row = dict.fromkeys(SWEEP_COLUMNS, "")
    row.update(function=which, z_re=z.real, z_im=z.imag, status="ok")
    try:
        res = evaluate(which, z, params, cfg.method, cfg.n, cfg.r, cfg.m_airy,
                       dps=cfg.digits if cfg.method == "lg" else None)
    except (RegionError, PathError) as exc:
        row["status"] = f"region: {exc}"
        return row
    row.update(value_re=res.value.real, value_im=res.value.imag, log10_abs=res.log10_modulus,
               phase=res.phase, method=res.method,
               error_bound="" if res.rel_error_bound is None else float(res.rel_error_bound))
    try:
        ref = evaluate(which, z, params, "oracle", dps=cfg.digits)
    except (OracleError, ArithmeticError, ValueError) as exc:
        row["status"] = f"oracle failed: {exc}"
        return row
    row.update(oracle_re=ref.value.real, oracle_im=ref.value.imag)
    lv = res.extras.get("log_value_mp", res.log_value)
    err = abs(ctx.exp(ctx.mpc(lv) - ref.extras["log_value_mp"]) - 1)
    row["rel_error"] = float(err)
    row["log10_rel_error"] = float(ctx.log10(err)) if err > 0 else -math.inf
    return row


def run_sweep(cfg: SweepConfig) -> list[dict]:
    cfg.validate()
    params = ParameterSet(cfg.mu, cfg.kappa)
    ctx = mpmath.mp.clone()
    ctx.dps = cfg.digits + 10
    rows = []
    for which in cfg.functions:
        for x in cfg.z_grid.points():
            rows.append(_sweep_row(which, complex(float(x), cfg.z_im), params, cfg, ctx))
    return rows


def write_rows(rows: list[dict], fmt: str, fh) -> None:
    if fmt == "csv":
        w = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: (repr(float(v)) if isinstance(v, float) else v) for k, v in row.items()})
    else:
        for row in rows:
            fh.write(json.dumps(row) + "\n")


def cmd_sweep(args) -> int:
    cfg = SweepConfig(mu=args.mu, kappa=args.kappa, n=args.n, r=args.r, m_airy=args.m,
                      functions=tuple(args.function.split(",")),
                      z_grid=GridSpec(args.start, args.stop, args.count, args.spacing),
                      z_im=args.z_im, method=args.method, output=args.output, format=args.format,
                      digits=args.digits)
    rows = run_sweep(cfg)
    if cfg.output == "-":
        write_rows(rows, cfg.format, sys.stdout)
    else:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            write_rows(rows, cfg.format, fh)
    bad = sum(1 for r in rows if r["status"] != "ok")
    print(f"{len(rows)} rows, {bad} flagged", file=sys.stderr)
    return EXIT_OK


# -- verify -------------------------------------------------------------------------------

def cmd_verify(args) -> int:
    from . import verify

    suites = verify.SUITES if args.suite == "all" else (args.suite,)
    ok = True
    for name in suites:
        checks = verify.run_suite(name, fast=args.fast, lam=args.lam, n_max=args.n_max,
                                  report=lambda chk: print(chk.line(), flush=True))
        ok &= all(chk.passed for chk in checks)
    print("verify: " + ("all checks passed" if ok else "FAILURES"))
    return EXIT_OK if ok else EXIT_VERIFY


# -- export ------------------------------------------------------------------------------------

def cmd_export(args) -> int:
    text = coefficient_table(args.lam, args.n_max).to_json()
    if args.output == "-":
        print(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return EXIT_OK


# -- parser ----------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="whitasym", description="Large-mu Whittaker function evaluation.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key = value file supplying defaults")
        sp.add_argument("--mu", type=float, default=20.0)
        sp.add_argument("--kappa", type=float, default=4.5)
        sp.add_argument("--n", type=int, default=11, help="LG truncation")
        sp.add_argument("--r", type=int, default=2, help="extra terms in the LG bound")
        sp.add_argument("--m", type=int, default=3, help="Airy truncation")
        sp.add_argument("--method", choices=METHODS, default="auto")
        sp.add_argument("--digits", type=int, default=default_digits(), help="oracle digits")

    e = sub.add_parser("eval", help="evaluate one function at one point")
    common(e)
    e.add_argument("--function", choices=FUNCTIONS, required=True)
    e.add_argument("--z-re", dest="z_re", type=float, required=True)
    e.add_argument("--z-im", dest="z_im", type=float, default=0.0)
    e.add_argument("--delta", type=float, default=0.05)
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("sweep", help="error sweep along a line parallel to the real axis")
    common(s)
    s.set_defaults(method="lg")
    s.add_argument("--function", default="M,W", help="comma list of M, W, Wminus")
    s.add_argument("--start", type=float, default=1e-3)
    s.add_argument("--stop", type=float, default=10.0)
    s.add_argument("--count", type=int, default=200)
    s.add_argument("--spacing", choices=("log", "linear"), default="log")
    s.add_argument("--z-im", dest="z_im", type=float, default=0.0)
    s.add_argument("--output", default="-")
    s.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="run property suites")
    v.add_argument("--config")
    v.add_argument("--suite", choices=("coefficients", "bounds", "connection", "airy-seam", "all"), default="all")
    v.add_argument("--fast", action="store_true")
    v.add_argument("--lambda", dest="lam", type=float, default=0.5)
    v.add_argument("--n-max", dest="n_max", type=int, default=8)
    v.set_defaults(func=cmd_verify)

    x = sub.add_parser("export", help="write a coefficient table as JSON")
    x.add_argument("--config")
    x.add_argument("--lambda", dest="lam", type=float, default=0.5)
    x.add_argument("--n-max", dest="n_max", type=int, default=8)
    x.add_argument("--output", default="-")
    x.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except RegionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("hint: --method airy (or auto) is valid throughout the upper half-plane", file=sys.stderr)
        return EXIT_REGION
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGIME if isinstance(exc, ValueError) else 1


if __name__ == "__main__":
    sys.exit(main())
