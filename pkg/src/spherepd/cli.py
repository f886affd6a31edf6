"""Command-line front end: ``spherepd <command> [options]``.

Output is JSON ({command, params, result, diagnostics, version}) or CSV.
Exit codes: 0 success, 1 usage or input error, 2 operator rejected the input,
3 a verification suite failed.  The default seed comes from SPHEREPD_SEED.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from . import __version__
from . import model, operators as op, schoenberg as sb, validation, verification
from .exceptions import SpherePDError
from .model import IsotropicFunction
from .schoenberg import INF, SchoenbergSequence

EXIT_OK, EXIT_USAGE, EXIT_REJECTED, EXIT_VERIFY = 0, 1, 2, 3
SEED_ENV = "SPHEREPD_SEED"
DEFAULT_GRID = 200
FAMILIES = ("constant", "cosine", "custom-cos", "multiquadric", "wendland-c2", "wendland-c4",
            "gaspari-cohn", "hat", "curve")


class UsageError(Exception):
    pass


class Rejected(Exception):
    def __init__(self, reason: str, payload: dict):
        super().__init__(reason)
        self.reason = reason
        self.payload = payload


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- serialization ----------------------------------------------------------------

def _number(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj) -> str:
    """JSON with floats written to 17 significant digits (non-finite as strings)."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _number(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _rows(result: dict):
    if "theta" in result:
        keys = ["theta"] + [k for k, v in result.items()
                            if k != "theta" and isinstance(v, list) and len(v) == len(result["theta"])]
        return keys, list(zip(*(result[k] for k in keys)))
    seq = result.get("sequence") or result.get("result_sequence")
    if isinstance(seq, dict) and "coefficients" in seq:
        return ["n", "coefficient"], list(enumerate(seq["coefficients"]))
    if "checks" in result:
        return ["name", "value", "tolerance", "passed"], [
            (c["name"], c["value"], c["tolerance"], c["passed"]) for c in result["checks"]]
    if "suites" in result:
        rows = [(s["suite"], c["name"], c["value"], c["tolerance"], c["passed"])
                for s in result["suites"] for c in s["checks"]]
        return ["suite", "name", "value", "tolerance", "passed"], rows
    flat = [(k, v) for k, v in result.items() if not isinstance(v, (dict, list))]
    return ["key", "value"], flat


def to_csv(result: dict) -> str:
    header, rows = _rows(result)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_number(float(v)).strip('"') if isinstance(v, (float, np.floating)) else v
                         for v in row])
    return buf.getvalue()


def emit(args, result: dict, diagnostics: Optional[dict] = None) -> None:
    params = {k: v for k, v in vars(args).items() if k not in ("handler", "out", "format", "command")}
    if args.format == "csv":
        text = to_csv(result)
    else:
        text = dumps({"command": args.command, "params": params, "result": result,
                      "diagnostics": diagnostics or {}, "version": __version__}) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- inputs ------------------------------------------------------------------------

def read_curve(path: str) -> IsotropicFunction:
    """psi from a 'theta,value' CSV, interpolated by a cubic spline over [0, pi]."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"theta", "value"} <= set(reader.fieldnames):
                raise UsageError("curve file needs a 'theta,value' header")
            rows = [(float(r["theta"]), float(r["value"])) for r in reader]
    except OSError as exc:
        raise UsageError(f"cannot read curve file: {exc}") from exc
    except ValueError as exc:
        raise UsageError(f"non-numeric entry in curve file: {exc}") from exc
    if len(rows) < 4:
        raise UsageError("curve file needs at least four rows")
    theta, value = map(np.array, zip(*rows))
    if np.any(np.diff(theta) <= 0):
        raise UsageError("theta must be strictly increasing")
    if abs(theta[0]) > 1e-12 or abs(theta[-1] - math.pi) > 1e-9:
        raise UsageError("theta must run from 0 to pi")
    spline = CubicSpline(theta, value)
    return IsotropicFunction(evaluator=lambda t: spline(np.clip(t, 0.0, math.pi)),
                             derivative_evaluator=lambda t: spline(np.clip(t, 0.0, math.pi), 1),
                             label=f"curve[{os.path.basename(path)}]")


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"family {args.family} needs --{', --'.join(missing)}")


def build_function(args) -> IsotropicFunction:
    fam = args.family
    if fam is None:
        if args.coeffs is not None:
            return sb.function_from_sequence(build_sequence(args))
        raise UsageError("give --family or --coeffs")
    if fam == "constant":
        return model.make_constant()
    if fam in ("cosine", "custom-cos"):
        return model.make_cosine()
    if fam == "multiquadric":
        _need(args, "tau", "delta")
        return model.make_multiquadric(args.tau, args.delta)
    if fam in ("wendland-c2", "wendland-c4"):
        _need(args, "tau", "c")
        return model.make_wendland(fam[-2:].upper(), args.tau, args.c)
    if fam == "gaspari-cohn":
        _need(args, "c")
        return model.make_gaspari_cohn_sphere(args.c, args.construction)
    if fam == "hat":
        _need(args, "c")
        return model.make_truncated_linear(args.c)
    if fam == "curve":
        _need(args, "curve")
        return read_curve(args.curve)
    raise UsageError(f"unknown family {fam!r}")


def parse_dim(text):
    if text is None:
        return None
    if text in ("inf", "infinity"):
        return INF
    try:
        d = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"dimension must be a positive integer or 'inf', got {text!r}")
    if d < 1:
        raise argparse.ArgumentTypeError("dimension must be positive")
    return d


def parse_coeffs(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad coefficient list {text!r}")


def build_sequence(args, dim=None) -> SchoenbergSequence:
    d = args.dim if dim is None else dim
    if d is None:
        raise UsageError("--dim is required")
    if args.coeffs is not None:
        return SchoenbergSequence.from_values(d, args.coeffs)
    if args.family == "multiquadric" and d == INF:
        _need(args, "tau", "delta")
        return sb.multiquadric_sequence(args.tau, args.delta, INF, args.n)
    if d == INF:
        raise UsageError("infinity-Schoenberg sequences are available for --family multiquadric or --coeffs")
    return sb.analyze(build_function(args), d, args.n if args.n is not None else sb.DEFAULT_N)


def grid(args) -> np.ndarray:
    if args.grid < 2:
        raise UsageError("--grid needs at least two points")
    return np.linspace(0.0, math.pi, args.grid)


def default_seed() -> int:
    text = os.environ.get(SEED_ENV, "1")
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {text!r}")


# -- commands ----------------------------------------------------------------------

def cmd_eval(args):
    psi = build_function(args)
    th = grid(args)
    emit(args, {"theta": th.tolist(), "value": np.asarray(psi(th)).tolist()}, {"label": psi.label})


def cmd_sequence(args):
    seq = build_sequence(args)
    report = validation.class_report(seq)
    emit(args, {"sequence": seq.to_dict()}, {"class_report": report.to_dict(),
                                             "normalization_ok": seq.normalization_ok()})


def _reject(report, message):
    raise Rejected(message, {"report": report.to_dict()})


def cmd_montee(args):
    th = grid(args)
    diagnostics = {}
    result = {}
    if args.dim is not None:
        seq = build_sequence(args)
        if args.family is not None and args.dim != INF:
            diagnostics["condition"] = op.montee_condition(build_function(args), args.dim, seq.N)
        rep = op.montee_sequence(seq)
        if not rep.admitted:
            key = "condition" if args.dim == INF else "c(d)"
            _reject(rep, f"c(d) negative: {rep.diagnostics[key]:.6g}")
        result["result_sequence"] = rep.result_sequence.to_dict()
        diagnostics.update(rep.diagnostics)
    psi = build_function(args)
    rep = op.montee_numeric(psi)
    if not rep.admitted:
        _reject(rep, f"zero normalizer: {rep.normalizer:.6g}")
    result.update({"theta": th.tolist(), "value": np.asarray(rep.result_function(th)).tolist(),
                   "normalizer": rep.normalizer})
    emit(args, result, diagnostics)


def cmd_descente(args):
    th = grid(args)
    diagnostics = {}
    result = {}
    if args.dim is not None:
        rep = op.descente_sequence(build_sequence(args))
        if not rep.admitted:
            _reject(rep, f"G2 divergent at truncation: {rep.normalizer:.6g}")
        result["result_sequence"] = rep.result_sequence.to_dict()
        diagnostics.update(rep.diagnostics)
    rep = op.descente_numeric(build_function(args))
    if not rep.admitted:
        _reject(rep, "psi''(0) vanishes")
    result.update({"theta": th.tolist(), "value": np.asarray(rep.result_function(th)).tolist(),
                   "normalizer": rep.normalizer})
    diagnostics.update(rep.diagnostics)
    emit(args, result, diagnostics)


def cmd_turning_bands(args):
    seq = build_sequence(args)
    if seq.dimension == INF:
        raise UsageError("turning bands needs a finite --dim")
    th = grid(args)
    d = seq.dimension
    down = op.turning_bands_down(seq, th)
    up = op.turning_bands_up(seq, th)
    direct = sb.synthesize(seq, th)
    shifted = sb.synthesize(op.shift(seq, -1), th, d + 2)
    emit(args, {"theta": th.tolist(), "psi_d": direct.tolist(), "down": down.tolist(),
                "shifted_psi_d_plus_2": shifted.tolist(), "up": up.tolist()},
         {"max_error_down": float(np.max(np.abs(down - direct))),
          "max_error_up": float(np.max(np.abs(up - shifted)))})


def cmd_to_one_dim(args):
    seq = build_sequence(args)
    one = sb.to_one_dim(seq)
    diagnostics = {}
    if args.check and args.family is not None and seq.dimension != INF:
        direct = sb.analyze(build_function(args), 1, seq.N)
        diagnostics["max_difference_vs_direct"] = float(np.max(np.abs(direct.coefficients - one.coefficients)))
    emit(args, {"sequence": one.to_dict()}, diagnostics)


def cmd_check_pd(args):
    psi = build_function(args)
    if args.dim is None or args.dim == INF:
        raise UsageError("check-pd needs a finite --dim")
    seeds = args.seeds if args.seeds else [args.seed if args.seed is not None else default_seed()]
    reports = [validation.pd_check(psi, args.dim, args.points, s).to_dict() for s in seeds]
    verdict = "pd-violated" if any(r["verdict"] == "pd-violated" for r in reports) else "pd-consistent"
    emit(args, {"verdict": verdict, "reports": reports})


def cmd_probe(args):
    psi = build_function(args)
    report = validation.differentiability_probe(psi, args.theta0, args.max_order)
    emit(args, report.to_dict())


def cmd_verify(args):
    names = list(verification.SUITES) if args.suite == "all" else [args.suite]
    results = [verification.run_suite(n) for n in names]
    passed = all(r["passed"] for r in results)
    emit(args, {"passed": passed, "suites": results})
    return EXIT_OK if passed else EXIT_VERIFY


# -- parser ------------------------------------------------------------------------

def _common(p):
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write output to this file instead of stdout")


def _family(p):
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--tau", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--c", type=float, help="support radius or scale")
    p.add_argument("--construction", choices=("lift", "restrict"), default="lift")
    p.add_argument("--curve", help="CSV file with columns theta,value")
    p.add_argument("--coeffs", type=parse_coeffs, help="comma-separated Schoenberg coefficients")
    p.add_argument("--dim", type=parse_dim, help="sphere dimension d or 'inf'")
    p.add_argument("--n", type=int, help="truncation index N")
    p.add_argument("--grid", type=int, default=DEFAULT_GRID, help="uniform grid size on [0, pi]")


def build_parser() -> Parser:
    parser = Parser(prog="spherepd", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)
    table = [
        ("eval", cmd_eval, "evaluate psi on a grid"),
        ("sequence", cmd_sequence, "d-Schoenberg coefficients of psi"),
        ("montee", cmd_montee, "apply the montee"),
        ("descente", cmd_descente, "apply the descente"),
        ("turning-bands", cmd_turning_bands, "evaluate both turning-bands identities"),
        ("to-one-dim", cmd_to_one_dim, "convert a d-sequence to a 1-sequence"),
        ("check-pd", cmd_check_pd, "Gram-matrix positive-definiteness check"),
        ("probe-smoothness", cmd_probe, "one-sided derivative probe at theta0"),
    ]
    for name, handler, helptext in table:
        p = sub.add_parser(name, help=helptext)
        _common(p)
        _family(p)
        p.set_defaults(handler=handler)
        if name == "to-one-dim":
            p.add_argument("--check", action="store_true", help="compare with direct 1-analysis")
        if name == "check-pd":
            p.add_argument("--points", type=int, default=60)
            p.add_argument("--seed", type=int, help=f"default from ${SEED_ENV} or 1")
            p.add_argument("--seeds", type=lambda s: [int(x) for x in s.split(",")])
        if name == "probe-smoothness":
            p.add_argument("--theta0", type=float, required=True)
            p.add_argument("--max-order", type=int, default=4)
    p = sub.add_parser("verify", help="run a named verification suite")
    _common(p)
    p.add_argument("suite", choices=list(verification.SUITES) + ["all"])
    p.set_defaults(handler=cmd_verify)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.handler(args)
    except Rejected as exc:
        sys.stderr.write(f"rejected: {exc.reason}\n")
        emit(args, {"admissibility": "rejected", "reason": exc.reason}, exc.payload)
        return EXIT_REJECTED
    except (UsageError, SpherePDError, ValueError) as exc:
        sys.stderr.write(f"spherepd {args.command}: {exc}\n")
        return EXIT_USAGE
    return EXIT_OK if code is None else code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
