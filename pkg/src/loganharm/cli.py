"""Command-line front end.

Examples::

    loganharm spectrum --family log --omega 0.001 --g 1 --levels 4
    loganharm largen --family centrifugal --N 10
    loganharm reproduce table1 --format json --out table1.json
    loganharm reproduce delta --alpha 0.01,0.02

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure,
3 a reproduction assertion failed.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import experiments, largen
from .eigensolver import ConvergenceError, GridError, GridSpec, converge, default_grid, write_wavefunctions_csv
from .potentials import (
    Centrifugal,
    LogAnharmonic,
    LogPower,
    NoMinimumError,
    PowerLaw,
    QuadLogWell,
    Quadratic,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_ASSERT = 0, 1, 2, 3

FAMILIES = {
    "quad": Quadratic,
    "quadratic": Quadratic,
    "log": LogAnharmonic,
    "loganharmonic": LogAnharmonic,
    "power": PowerLaw,
    "powerlaw": PowerLaw,
    "logpower": LogPower,
    "centrifugal": Centrifugal,
    "quadlog": QuadLogWell,
    "quadlogwell": QuadLogWell,
}

# family -> (constructor field, RunConfig key)
FAMILY_PARAMS = {
    Quadratic: (("omega", "omega"),),
    LogAnharmonic: (("omega", "omega"), ("g", "g")),
    PowerLaw: (("omega", "omega"), ("lam", "lambda"), ("alpha", "alpha")),
    LogPower: (("omega", "omega"), ("g", "g"), ("p", "p")),
    Centrifugal: (("N", "N"),),
    QuadLogWell: (("c", "c"),),
}

TARGETS = ("table1", "fig1", "fig2", "fig3", "fig4", "delta", "sweep")

CONFIG_KEYS = {
    "potential": {"family", "omega", "g", "lambda", "alpha", "p", "N", "c"},
    "solver": {"tol", "max_refinements", "domain", "points", "parity", "levels"},
    "experiment": {"target", "alphas", "omegas", "g"},
    "output": {"format", "out"},
}

_FLOAT_KEYS = {"omega", "g", "lambda", "alpha", "N", "c", "tol"}
_INT_KEYS = {"p", "max_refinements", "points", "levels"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    family: str | None = None
    params: dict = field(default_factory=dict)
    levels: int = 4
    tol: float = 1e-8
    max_refinements: int = 8
    domain: tuple | None = None
    points: int | None = None
    parity: str | None = None
    target: str | None = None
    alphas: tuple = experiments.DELTA_ALPHAS
    omegas: tuple = experiments.SWEEP_OMEGAS
    sweep_g: float = 1.0
    format: str = "json"
    out: str | None = None

    def spec(self):
        if self.family is None:
            raise ConfigError("no potential family given (--family)")
        try:
            cls = FAMILIES[self.family.lower()]
        except KeyError:
            raise ConfigError(f"unknown family {self.family!r}; choose from {sorted(FAMILIES)}") from None
        kwargs = {}
        for arg, key in FAMILY_PARAMS[cls]:
            if key not in self.params:
                raise ConfigError(f"family {self.family!r} needs --{key}")
            kwargs[arg] = self.params[key]
        return cls(**kwargs)


def _float_list(text):
    try:
        return tuple(float(t) for t in str(text).split(",") if t.strip())
    except ValueError:
        raise ConfigError(f"not a comma-separated list of numbers: {text!r}") from None


def _convert(key, value):
    try:
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _INT_KEYS:
            return int(value)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {value!r}") from None
    return value


def _apply(cfg, key, value, section=None):
    if value is None:
        return
    if key in ("omega", "g", "lambda", "alpha", "p", "N", "c") and section != "experiment":
        cfg.params[key] = _convert(key, value)
    elif key == "g":
        cfg.sweep_g = _convert(key, value)
    elif key == "domain":
        lo_hi = value if isinstance(value, tuple) else _float_list(value)
        if len(lo_hi) != 2:
            raise ConfigError("domain must be 'x_lo,x_hi'")
        cfg.domain = lo_hi
    elif key in ("alphas", "omegas"):
        setattr(cfg, key, value if isinstance(value, tuple) else _float_list(value))
    elif key == "parity":
        if value not in ("even", "odd"):
            raise ConfigError("parity must be 'even' or 'odd'")
        cfg.parity = value
    elif key == "format":
        if value not in ("json", "csv"):
            raise ConfigError("format must be 'json' or 'csv'")
        cfg.format = value
    else:
        setattr(cfg, key, _convert(key, value))


def load_config(path):
    """Read a flat ``key = value`` file with ``[section]`` headers."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    cfg = RunConfig()
    for section in parser.sections():
        if section not in CONFIG_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key, value in parser.items(section):
            if key not in CONFIG_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            _apply(cfg, key, value, section)
    return cfg


def build_config(args):
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    for key in ("family", "tol", "max_refinements", "points", "parity", "levels", "format", "out"):
        _apply(cfg, key, getattr(args, key, None))
    for key in ("omega", "g", "lambda", "alpha", "p", "N", "c"):
        _apply(cfg, key, getattr(args, key.replace("lambda", "lam"), None))
    _apply(cfg, "domain", getattr(args, "domain", None))
    if getattr(args, "target", None) is not None:
        cfg.target = args.target
    if getattr(args, "alphas", None) is not None:
        _apply(cfg, "alphas", args.alphas)
    if getattr(args, "omegas", None) is not None:
        _apply(cfg, "omegas", args.omegas)
    if getattr(args, "sweep_g", None) is not None:
        cfg.sweep_g = float(args.sweep_g)
    if cfg.levels < 1:
        raise ConfigError("levels must be >= 1")
    return cfg


def _spec_dict(spec):
    return {"family": type(spec).__name__, **dataclasses.asdict(spec)}


def _emit(text, cfg):
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dumps(doc):
    return json.dumps(experiments._plain(doc), indent=2, sort_keys=True) + "\n"


def cmd_spectrum(cfg):
    spec = cfg.spec()
    grid = None
    if cfg.domain is not None:
        lo, hi = cfg.domain
        if cfg.points is None:
            base = default_grid(spec, min_points=4 * cfg.levels)
            n = int(math.ceil((hi - lo) / base.h))
        else:
            n = cfg.points
        grid = GridSpec(lo, hi, max(n + n % 2, 16))
    elif cfg.points is not None:
        base = default_grid(spec)
        grid = GridSpec(base.x_lo, base.x_hi, cfg.points)
    conv = converge(
        spec, cfg.levels, cfg.tol, grid=grid, parity=cfg.parity, max_refinements=cfg.max_refinements
    )
    if cfg.format == "csv":
        buf = io.StringIO()
        write_wavefunctions_csv(conv.result, buf, spec=spec, energies=conv.energies)
        _emit(buf.getvalue(), cfg)
    else:
        g = conv.grid
        doc = {
            "spec": _spec_dict(spec),
            "energies": [float(e) for e in conv.energies],
            "parities": list(conv.result.parities),
            "residuals": [float(r) for r in conv.result.residuals],
            "achieved_tol": conv.achieved_tol,
            "target_tol": cfg.tol,
            "grid": {"x_lo": g.x_lo, "x_hi": g.x_hi, "n_points": g.n_points, "staggered": g.staggered},
        }
        _emit(_dumps(doc), cfg)
    return EXIT_OK


def cmd_largen(cfg):
    spec = cfg.spec()
    est = largen.estimate_spectrum(spec, cfg.levels - 1)
    rows = [
        {"n": n, "shift": s, "estimate": e} for n, (s, e) in enumerate(zip(est.levels, est.energies))
    ]
    doc = {
        "spec": _spec_dict(spec),
        "R": est.R,
        "offset": est.offset,
        "spacing": est.spacing,
    }
    if isinstance(spec, Centrifugal):
        for row, exact in zip(rows, largen.centrifugal_exact(spec.N, cfg.levels - 1)):
            row["exact"] = float(exact)
            row["exact_minus_estimate"] = float(exact) - row["estimate"]
    if isinstance(spec, LogAnharmonic):
        rep = largen.validity_report(spec, 0)
        doc["validity"] = dataclasses.asdict(rep)
        doc["regime"] = rep.regime.value
        doc["overlap"] = largen.approximant_overlap(spec)
        doc["log_overlap"] = largen.log_approximant_overlap(spec)
    doc["levels"] = rows
    if cfg.format == "csv":
        buf = io.StringIO()
        buf.write(experiments.CSV_VERSION + "\n")
        buf.write(f"# spec: {spec!r}\n")
        buf.write(f"# R: {est.R!r} offset: {est.offset!r}\n")
        if "regime" in doc:
            buf.write(f"# regime: {doc['regime']}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(rows[0]))
        for r in rows:
            writer.writerow([experiments._cell(v) for v in r.values()])
        _emit(buf.getvalue(), cfg)
    else:
        _emit(_dumps(doc), cfg)
    return EXIT_OK


def cmd_reproduce(cfg):
    target = cfg.target
    if target not in TARGETS:
        raise ConfigError(f"unknown target {target!r}; choose from {', '.join(TARGETS)}")
    if target == "table1":
        rep = experiments.run_table1(min(cfg.tol, 1e-8))
    elif target == "delta":
        rep = experiments.run_delta(alphas=cfg.alphas, tol=min(cfg.tol, 1e-10))
    elif target == "sweep":
        rep = experiments.run_sweep(g=cfg.sweep_g, omegas=cfg.omegas, tol=cfg.tol)
    else:
        rep = experiments.run_figure(target, cfg.tol)
    _emit(rep.to_csv() if cfg.format == "csv" else rep.to_json(), cfg)
    for name, check in rep.checks.items():
        print(f"{'PASS' if check.passed else 'FAIL'} {target}.{name} {check.detail}", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_ASSERT


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p):
    p.add_argument("--config", help="key=value config file with [section] headers")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--out", help="output path (stdout if omitted)")
    p.add_argument("--tol", type=float)


def _potential_flags(p):
    p.add_argument("--family")
    p.add_argument("--omega", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--p", type=int)
    p.add_argument("--N", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--levels", type=int)


def make_parser():
    parser = _Parser(prog="loganharm", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    sp = sub.add_parser("spectrum", help="grid-converged eigenvalues and wavefunctions")
    _potential_flags(sp)
    _common(sp)
    sp.add_argument("--max-refinements", dest="max_refinements", type=int)
    sp.add_argument("--domain", help="x_lo,x_hi")
    sp.add_argument("--points", type=int, help="initial number of grid points")
    sp.add_argument("--parity", choices=("even", "odd"))

    lp = sub.add_parser("largen", help="leading-order large-N estimate and validity report")
    _potential_flags(lp)
    _common(lp)

    rp = sub.add_parser("reproduce", help="rerun a table, figure or check")
    rp.add_argument("target", help="|".join(TARGETS))
    _common(rp)
    rp.add_argument("--alpha", dest="alphas", help="comma-separated exponents for 'delta'")
    rp.add_argument("--omegas", help="comma-separated frequencies for 'sweep'")
    rp.add_argument("--g", dest="sweep_g", type=float, help="coupling for 'sweep'")
    return parser


COMMANDS = {"spectrum": cmd_spectrum, "largen": cmd_largen, "reproduce": cmd_reproduce}


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg)
    except (ConvergenceError, NoMinimumError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, GridError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
