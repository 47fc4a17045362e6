"""Command-line front end.

Usage::

    addlab SUBCOMMAND [options]

Subcommands: spectrum, optimize, gap, certify, kink-scan, suite,
tensor-check, convexity. Every subcommand writes one JSON report (default)
or CSV rows (``--format csv``) to stdout or ``--output PATH``.

Exit codes: 0 on success, 1 on a usage or spec error, 2 when a certifying
subcommand (``gap``, ``kink-scan``) could not reach a verdict because the
search did not converge. The report is written in every case except 1.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .channels import ChannelPair, parse_channel, parse_pair
from .experiments import (
    DEFAULT_KINK_GRID,
    DEFAULT_LAMBDA_GRID,
    Verdict,
    additivity_gap,
    exhw_certificate,
    kink_scan,
    operator_convex_suite,
    random_tensor_check,
    tensor_structure_check,
)
from .functions import operator_convexity_test, parse_function
from .linalg import matrix_to_dict
from .optimize import (
    OptimizerConfig,
    max_output_eigenvalue,
    max_output_eigenvalue_product,
    max_trace,
    max_trace_entangled,
    max_trace_product,
    max_trace_schmidt_wh3,
)
from .schemas import CSV_COLUMNS
from .wh_spectra import wh3_pair_spectrum

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- formatting


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def dumps(obj) -> str:
    """Deterministic JSON: insertion-ordered keys, floats with 17 significant digits,
    non-finite floats as null."""
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    if v is None:
        return ""
    if isinstance(v, (list, tuple, np.ndarray)):
        return ";".join(_cell(x) for x in v)
    return str(v)


def to_csv(header: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


# ---------------------------------------------------------------- arguments


def _floats(text: str) -> list:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    return vals


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _add_output(p):
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")


def _add_optimizer(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=_positive_int, default=64)
    p.add_argument("--max-iters", type=_positive_int, default=2000)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--grid", type=_positive_int, default=200, help="Schmidt simplex steps per edge")
    p.add_argument("--threads", type=_positive_int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="addlab", description="Generalized additivity experiments for quantum channels.")
    parser.add_argument("--version", action="version", version=f"addlab {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("spectrum", help="closed-form output spectrum of the wh:3 pair")
    p.add_argument("--schmidt", type=_floats, required=True, help="three Schmidt coefficients, e.g. 0.5,0.5,0")
    _add_output(p)

    p = sub.add_parser("optimize", help="maximise Tr f over inputs")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--pair", help="two channel specs, e.g. wh:3,wh:3")
    g.add_argument("--channel", help="a single channel spec")
    p.add_argument("--fn", help="function spec (not needed for --mode maxeig)")
    p.add_argument("--mode", choices=("product", "entangled", "schmidt", "maxeig"), default="entangled")
    _add_optimizer(p)
    _add_output(p)

    p = sub.add_parser("gap", help="additivity gap of f for a channel pair")
    p.add_argument("--pair", required=True)
    p.add_argument("--fn", required=True)
    _add_optimizer(p)
    _add_output(p)

    p = sub.add_parser("certify", help="exact product vs maximally entangled comparison for the wh:3 pair")
    p.add_argument("--fn", required=True)
    _add_output(p)

    p = sub.add_parser("kink-scan", help="additivity of kink functions across a grid of kink locations")
    p.add_argument("--pair", default="wh:3,wh:3")
    p.add_argument("--x0", type=_floats, default=None, help="kink locations (default: 29 points on [0.05, 0.75])")
    _add_optimizer(p)
    _add_output(p)

    p = sub.add_parser("suite", help="operator convex family on the wh:3 Schmidt simplex")
    p.add_argument("--lambdas", type=_floats, default=None, help="lambda values in (-1, 0]")
    _add_optimizer(p)
    _add_output(p)

    p = sub.add_parser("tensor-check", help="check Tr g(sigma) = Tr f(sigma (x) diag(mu))")
    p.add_argument("--fn", default=None, help="fixed function (default: random built-ins)")
    p.add_argument("--mu", type=_floats, default=None, help="fixed probability vector (with --fn)")
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("convexity", help="sample the operator convexity inequality")
    p.add_argument("--fn", required=True)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--samples", type=_positive_int, default=500)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)
    return parser


def _config(args) -> OptimizerConfig:
    return OptimizerConfig(restarts=args.restarts, max_iters=args.max_iters, tol=args.tol, seed=args.seed,
                           simplex_grid=args.grid, threads=args.threads)


def _config_dict(cfg: OptimizerConfig) -> dict:
    return {"restarts": cfg.restarts, "max_iters": cfg.max_iters, "tol": cfg.tol, "seed": cfg.seed,
            "grid": cfg.simplex_grid}


# ---------------------------------------------------------------- commands
# Each command returns (report dict, csv rows, exit code); CSV headers live in schemas.CSV_COLUMNS.


def cmd_spectrum(args):
    spec = wh3_pair_spectrum(args.schmidt)
    raw = np.concatenate([spec.e_values, spec.g_values])
    order = np.argsort(-raw, kind="stable")
    values = raw[order]
    kinds = [("e" if k < len(spec.e_values) else "g") for k in order]
    report = {"command": "spectrum", "schmidt": list(args.schmidt), "eigenvalues": values.tolist(),
              "e_values": list(spec.e_values), "g_values": list(spec.g_values), "t": spec.t, "theta": spec.theta}
    rows = [(i, v, k) for i, (v, k) in enumerate(zip(values, kinds))]
    return report, rows, EXIT_OK


def cmd_optimize(args):
    cfg = _config(args)
    if args.mode != "maxeig" and args.fn is None:
        raise UsageError(f"--fn is required for --mode {args.mode}")
    f = parse_function(args.fn) if args.fn is not None else None
    target = parse_pair(args.pair) if args.pair else parse_channel(args.channel)
    is_pair = isinstance(target, ChannelPair)
    if args.mode in ("product", "schmidt") and not is_pair:
        raise UsageError(f"--mode {args.mode} needs --pair")
    if args.mode == "product":
        res = max_output_eigenvalue_product(target, cfg) if f is None else max_trace_product(f, target, cfg)
    elif args.mode == "schmidt":
        if not target.is_wh3_pair:
            raise UsageError("--mode schmidt is only available for the pair wh:3,wh:3")
        res = max_trace_schmidt_wh3(f, cfg)
    elif args.mode == "maxeig":
        res = max_output_eigenvalue(target, cfg)
    elif is_pair:
        res = max_trace_entangled(f, target, cfg)
    else:
        res = max_trace(f, target, cfg)
    report = {"command": "optimize", "mode": args.mode, "function_spec": None if f is None else f.spec,
              "target_spec": target.spec, "config": _config_dict(cfg)}
    report.update(res.to_dict())
    rows = [(res.value, res.restarts_agreeing, res.converged, res.exact, res.schmidt)]
    return report, rows, EXIT_OK


def _unresolved(rep) -> bool:
    return rep.verdict == Verdict.NUMERICAL_EVIDENCE_ONLY and not rep.converged


def cmd_gap(args):
    cfg = _config(args)
    f, pair = parse_function(args.fn), parse_pair(args.pair)
    rep = additivity_gap(f, pair, cfg)
    report = {"command": "gap", "config": _config_dict(cfg)}
    report.update(rep.to_dict())
    return report, [tuple(rep.to_dict().values())], EXIT_NUMERICAL if _unresolved(rep) else EXIT_OK


def cmd_certify(args):
    f = parse_function(args.fn)
    cert = exhw_certificate(f)
    report = {"command": "certify", "function_spec": f.spec}
    report.update(cert.to_dict())
    return report, [(f.spec, cert.lhs, cert.rhs, cert.non_additive)], EXIT_OK


def cmd_kink_scan(args):
    cfg = _config(args)
    pair = parse_pair(args.pair)
    grid = DEFAULT_KINK_GRID if args.x0 is None else args.x0
    rep = kink_scan(grid, pair, cfg)
    report = {"command": "kink-scan", "pair_spec": pair.spec, "config": _config_dict(cfg)}
    report.update(rep.to_dict())
    code = EXIT_NUMERICAL if any(_unresolved(r) for r in rep.reports) else EXIT_OK
    return report, rep.grid, code


def cmd_suite(args):
    cfg = _config(args)
    lambdas = DEFAULT_LAMBDA_GRID if args.lambdas is None else args.lambdas
    rep = operator_convex_suite(lambdas, cfg)
    report = {"command": "suite", "config": _config_dict(cfg)}
    report.update(rep.to_dict())
    return report, [tuple(r.values()) for r in report["rows"]], EXIT_OK


def cmd_tensor_check(args):
    if args.fn is None:
        if args.mu is not None:
            raise UsageError("--mu needs --fn")
        rep = random_tensor_check(args.trials, args.seed)
        fspec, mu = None, None
    else:
        f = parse_function(args.fn)
        mu = [0.5, 0.5] if args.mu is None else args.mu
        rep = tensor_structure_check(f, mu, args.trials, args.seed)
        fspec = f.spec
    report = {"command": "tensor-check", "function_spec": fspec, "mu": mu, "seed": args.seed}
    report.update(rep.to_dict())
    return report, [(rep.trials, rep.max_error, rep.passed)], EXIT_OK


def cmd_convexity(args):
    f = parse_function(args.fn)
    rep = operator_convexity_test(f, dim=args.dim, samples=args.samples, seed=args.seed)
    witness = None
    if not rep.passed and rep.witness is not None:
        witness = {"a": matrix_to_dict(rep.witness[0]), "b": matrix_to_dict(rep.witness[1])}
    report = {"command": "convexity", "function_spec": f.spec, "dim": args.dim, "samples": rep.samples,
              "seed": args.seed, "passed": rep.passed, "worst_violation": rep.worst_violation, "witness": witness}
    return report, [(f.spec, args.dim, rep.samples, rep.passed, rep.worst_violation)], EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "optimize": cmd_optimize,
    "gap": cmd_gap,
    "certify": cmd_certify,
    "kink-scan": cmd_kink_scan,
    "suite": cmd_suite,
    "tensor-check": cmd_tensor_check,
    "convexity": cmd_convexity,
}


def parse_and_dispatch(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        report, rows, code = COMMANDS[args.command](args)
    except (UsageError, ValueError, OSError) as exc:
        stderr.write(parser.format_usage())
        stderr.write(f"addlab: error: {exc}\n")
        return EXIT_USAGE
    text = dumps(report) + "\n" if args.format == "json" else to_csv(CSV_COLUMNS[args.command], rows)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main(argv=None) -> int:
    try:
        return parse_and_dispatch(argv)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
