"""Command-line interface: ``freeangles <command> [flags]``.

Exit codes: 0 success, 2 usage error, 3 domain or I/O error, 4 failed verification.
Experiment flags can also come from ``--config file.json``; keys are the flag
names with underscores, and flags given on the command line win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import TextIO

import numpy as np

from .blocks import block_structure, exact_spectrum, SpectrumWithMultiplicity
from .figure import FigureSpec, write_figure
from .laws import LAWS, uniform_angle_law
from .montecarlo import (
    DENSE_MAX_N,
    PATHS,
    TARGETS,
    ExperimentConfig,
    empirical_spectrum,
    convergence_report,
    describe,
    ks_distance,
    limit_law_for,
    w1_distance,
)
from .ncpoly import NCParseError, evaluate, parse_ncpoly
from .subspace import DEFAULT_TOL_ZERO, FIELDS, haar_subspace, principal_angles, projector, rng_stream
from .verify import SUITES, reports_json, run_suite

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_VERIFY = 0, 2, 3, 4

# laws reachable from the command line; the Bernoulli ones take alpha and beta
CLI_LAWS = {
    "boxtimes": True,
    "angles": True,
    "boxplus": True,
    "commutator": True,
    "anticommutator": True,
    "anticommutator_half": False,
    "p_plus_qpq": False,
    "p_plus_qpq_pushforward": False,
    "uniform_angles": False,
}

PAIR_DEFAULTS = {"n": None, "k": None, "l": None, "seed": 0, "field": "real", "tol": DEFAULT_TOL_ZERO}
EXPERIMENT_DEFAULTS = {
    "n": None, "k": None, "l": None, "trials": 1, "seed": 0, "field": "real",
    "target": "p_plus_qpq", "path": "exact-blocks", "tol_zero": DEFAULT_TOL_ZERO, "workers": 1,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")

    def exit(self, status=0, message=None):
        if message:
            sys.stderr.write(message)
        raise SystemExit(status)


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be a nonnegative integer, got {text}")
    return v


def _unit(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {text}")
    return v


def _add_config(p):
    p.add_argument("--config", type=Path, help="JSON file with flag values (flags override it)")


def _add_pair_flags(p, s=argparse.SUPPRESS):
    p.add_argument("--n", type=_positive_int, default=s, help="ambient dimension")
    p.add_argument("--k", type=_nonneg_int, default=s, help="dimension of E")
    p.add_argument("--l", type=_nonneg_int, default=s, help="dimension of F")
    p.add_argument("--seed", type=int, default=s, help="random seed (default 0)")
    p.add_argument("--field", choices=FIELDS, default=s, help="real or complex (default real)")


def _add_experiment_flags(p, s=argparse.SUPPRESS):
    _add_pair_flags(p)
    p.add_argument("--trials", type=_positive_int, default=s, help="number of independent trials (default 1)")
    p.add_argument("--target", default=s,
                   help=f"one of {', '.join(TARGETS)} or a polynomial such as 'p + q*p*q' (default p_plus_qpq)")
    p.add_argument("--path", choices=PATHS, default=s,
                   help=f"block formulas or dense eigensolver, n <= {DENSE_MAX_N} (default exact-blocks)")
    p.add_argument("--tol-zero", dest="tol_zero", type=float, default=s,
                   help=f"angles at or below this count as zero (default {DEFAULT_TOL_ZERO})")
    p.add_argument("--workers", type=_positive_int, default=s, help="threads used for trials (default 1)")
    p.add_argument("--alpha", type=_unit, default=s, help="limit-law parameter (default k/n)")
    p.add_argument("--beta", type=_unit, default=s, help="limit-law parameter (default l/n)")
    _add_config(p)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="freeangles", description="Principal angles, projection spectra and their free limits.")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("angles", help="principal angles between two Haar random subspaces")
    _add_pair_flags(p)
    p.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                   help=f"zero-angle tolerance (default {DEFAULT_TOL_ZERO})")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format (default csv)")
    _add_config(p)

    p = sub.add_parser("spectrum", help="spectrum of a polynomial in the two projections")
    _add_pair_flags(p)
    p.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                   help=f"zero-angle tolerance (default {DEFAULT_TOL_ZERO})")
    p.add_argument("--poly", default=argparse.SUPPRESS, help="polynomial, for example 'p*q*p' (default p + q*p*q)")
    p.add_argument("--path", choices=PATHS, default=argparse.SUPPRESS,
                   help="block formulas or dense eigensolver (default exact-blocks)")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format (default csv)")
    _add_config(p)

    p = sub.add_parser("law", help="density, distribution function and atoms of a limit law")
    p.add_argument("name", choices=sorted(CLI_LAWS), help="law to tabulate")
    p.add_argument("--alpha", type=_unit, default=0.5, help="trace of p (default 0.5)")
    p.add_argument("--beta", type=_unit, default=0.5, help="trace of q (default 0.5)")
    p.add_argument("--grid", type=_positive_int, default=1001, help="grid points per continuous piece (default 1001)")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="csv table or JSON law export")

    p = sub.add_parser("simulate", help="Monte Carlo experiment and distances to the limit law")
    _add_experiment_flags(p)
    p.add_argument("--n-list", dest="n_list", default=argparse.SUPPRESS,
                   help="comma-separated n values for a convergence table (k, l scaled by alpha, beta)")
    p.add_argument("--dump-samples", dest="dump_samples", default=None,
                   help="write pooled samples as CSV to this path ('-' prints them instead of the report)")

    p = sub.add_parser("figure", help="SVG histogram of a simulated spectrum with the limit density")
    _add_experiment_flags(p)
    p.add_argument("--output", type=Path, required=True, help="SVG file to write")
    p.add_argument("--bins", type=_positive_int, default=None, help="number of bins (default Freedman-Diaconis)")
    p.add_argument("--law", choices=sorted(CLI_LAWS) + ["none"], default=None,
                   help="overlay law (default: the limit law of the target)")
    p.add_argument("--xmin", type=float, default=None, help="left end of the plotted range")
    p.add_argument("--xmax", type=float, default=None, help="right end of the plotted range")
    p.add_argument("--title", default=None, help="figure title")
    p.add_argument("--no-csv", dest="no_csv", action="store_true", help="skip the histogram/density CSV pair")

    p = sub.add_parser("verify", help="run self-check suites")
    p.add_argument("suite", choices=list(SUITES) + ["all"], help="suite name or 'all'")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--quick", action="store_true", help="smaller samples and grids")
    mode.add_argument("--full", action="store_true", help="full sizes (default)")
    p.add_argument("--report", type=Path, default=None, help="also write the JSON report to this file")
    return parser


def _merged(args: argparse.Namespace, defaults: dict, extra: tuple = ()) -> dict:
    """Defaults, then the JSON config, then explicit flags."""
    given = {k: v for k, v in vars(args).items() if k in defaults or k in extra}
    cfg = {}
    if getattr(args, "config", None) is not None:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError(f"config {args.config} must hold a JSON object")
        unknown = set(cfg) - set(defaults) - set(extra)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    out = {**defaults, **cfg, **given}
    for key in ("n", "k", "l"):
        if key in defaults and out.get(key) is None:
            raise UsageError(f"--{key} is required (flag or config)")
    if "n" in defaults and not (0 <= out["k"] <= out["n"] and 0 <= out["l"] <= out["n"]):
        raise UsageError(f"need 0 <= k, l <= n, got n={out['n']}, k={out['k']}, l={out['l']}")
    return out


def _law_by_name(name: str, alpha: float, beta: float):
    if name == "uniform_angles":
        return uniform_angle_law()
    fn = LAWS[name]
    return fn(alpha, beta) if CLI_LAWS[name] else fn()


def _pair(o: dict):
    rng = rng_stream(o["seed"])
    E = haar_subspace(o["n"], o["k"], rng, o["field"])
    F = haar_subspace(o["n"], o["l"], rng, o["field"])
    return E, F


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_angles(args, out: TextIO) -> int:
    o = _merged(args, PAIR_DEFAULTS)
    E, F = _pair(o)
    spec = principal_angles(E, F, o["tol"])
    if args.format == "json":
        out.write(spec.to_json() + "\n")
        return EXIT_OK
    rows = [
        [i, repr(float(t)), repr(float(np.cos(t))), "zero" if t <= spec.tol_zero else "nonzero"]
        for i, t in enumerate(spec.angles)
    ]
    out.write(_csv(rows, ["index", "angle", "cosine", "class"]))
    return EXIT_OK


def cmd_spectrum(args, out: TextIO) -> int:
    o = _merged(args, {**PAIR_DEFAULTS, "poly": "p + q*p*q", "path": "exact-blocks"})
    poly = parse_ncpoly(o["poly"])
    if not poly.is_self_adjoint(tol=1e-14):
        raise ValueError(f"polynomial {poly} is not self-adjoint; its spectrum need not be real")
    if o["path"] == "dense-oracle" and o["n"] > DENSE_MAX_N:
        raise ValueError(f"dense-oracle path is limited to n <= {DENSE_MAX_N}")
    E, F = _pair(o)
    if o["path"] == "exact-blocks":
        blocks = block_structure(o["n"], o["k"], o["l"], principal_angles(E, F, o["tol"]))
        spec = exact_spectrum(poly, blocks)
    else:
        M = evaluate(poly, projector(E), projector(F))
        spec = SpectrumWithMultiplicity.from_values(np.linalg.eigvalsh(0.5 * (M + M.conj().T)))
    out.write(spec.to_json() + "\n" if args.format == "json" else spec.to_csv())
    return EXIT_OK


def cmd_law(args, out: TextIO) -> int:
    law = _law_by_name(args.name, args.alpha, args.beta)
    if args.format == "json":
        out.write(law.to_json() + "\n")
        return EXIT_OK
    x, d, F = law.density_grid(args.grid)
    rows = [["density", repr(float(a)), repr(float(b)), repr(float(c)), ""] for a, b, c in zip(x, d, F)]
    rows += [["atom", repr(float(loc)), "", repr(float(law.cdf(loc))), repr(float(m))] for loc, m in law.atoms]
    out.write(_csv(rows, ["kind", "x", "density", "cdf", "mass"]))
    return EXIT_OK


def _experiment(args) -> tuple[ExperimentConfig, dict]:
    o = _merged(args, EXPERIMENT_DEFAULTS, extra=("alpha", "beta", "n_list"))
    fields = {k: o[k] for k in EXPERIMENT_DEFAULTS}
    return ExperimentConfig(**fields), o


def _limit_for(cfg: ExperimentConfig, o: dict):
    alpha = o.get("alpha", cfg.k / cfg.n)
    beta = o.get("beta", cfg.l / cfg.n)
    try:
        return limit_law_for(cfg.target, alpha, beta), alpha, beta
    except ValueError:
        return None, alpha, beta


def cmd_simulate(args, out: TextIO) -> int:
    cfg, o = _experiment(args)
    if o.get("n_list"):
        n_list = [int(v) for v in str(o["n_list"]).split(",") if v.strip()]
        law, alpha, beta = _limit_for(cfg, o)
        if law is None:
            raise ValueError(f"no limit law known for target {cfg.target!r} at alpha={alpha}, beta={beta}")
        out.write(convergence_report(cfg, n_list, alpha, beta, law).to_csv())
        return EXIT_OK
    emp = empirical_spectrum(cfg)
    if args.dump_samples == "-":
        out.write(emp.to_csv())
        return EXIT_OK
    if args.dump_samples:
        _write(Path(args.dump_samples), emp.to_csv())
    law, alpha, beta = _limit_for(cfg, o)
    row = [cfg.n, cfg.k, cfg.l, cfg.trials, emp.count, repr(emp.total_mass)]
    if law is not None:
        row += [law.name, repr(alpha), repr(beta), repr(ks_distance(emp, law)), repr(w1_distance(emp, law))]
    else:
        row += ["", "", "", "", ""]
    out.write(_csv([row], ["n", "k", "l", "trials", "samples", "total_mass", "law", "alpha", "beta", "ks", "w1"]))
    return EXIT_OK


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def cmd_figure(args, out: TextIO) -> int:
    cfg, o = _experiment(args)
    emp = empirical_spectrum(cfg)
    if args.law == "none":
        law = None
    elif args.law is not None:
        law = _law_by_name(args.law, o.get("alpha", cfg.k / cfg.n), o.get("beta", cfg.l / cfg.n))
    else:
        law = _limit_for(cfg, o)[0]
    x_range = None
    if args.xmin is not None or args.xmax is not None:
        lo = args.xmin if args.xmin is not None else float(emp.samples[0])
        hi = args.xmax if args.xmax is not None else float(emp.samples[-1])
        if hi <= lo:
            raise ValueError("--xmax must exceed --xmin")
        x_range = (lo, hi)
    spec = FigureSpec.build(emp, law, args.bins, args.title or describe(cfg), x_range)
    for path in write_figure(spec, args.output, csv_pair=not args.no_csv):
        out.write(f"{path}\n")
    return EXIT_OK


def cmd_verify(args, out: TextIO) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    reports = [run_suite(name, quick=args.quick) for name in names]
    text = reports_json(reports)
    out.write(text + "\n")
    if args.report is not None:
        _write(args.report, text + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY


COMMANDS = {
    "angles": cmd_angles,
    "spectrum": cmd_spectrum,
    "law": cmd_law,
    "simulate": cmd_simulate,
    "figure": cmd_figure,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args, out)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except (ValueError, NCParseError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_DOMAIN


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
