"""Command-line runner: ``rieszbounds <command> [options]``.

Exit status: 0 on success, 1 when a verify suite records a failure, 2 for
malformed input or configuration, 3 for numerical failures.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import analytic, bounds, mz, suites
from .errors import InvalidInputError, NumericError
from .report import build_report, dumps, grid_to_csv, records_to_csv
from .spectra import (
    PeriodicSpectrum,
    counterexample_family,
    read_nodes,
    roots_of_unity,
    separation,
)
from .vandermonde import exact_bounds

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_NUMERIC = 0, 1, 2, 3

SUITES = ("kadec", "general-kadec", "avdonin", "sine-type", "gautschi", "phi-decay")


class UsageError(Exception):
    pass


def parse_nodes(text: str):
    """``roots:<d>``, ``counter:<d>`` or ``file:<path>``."""
    kind, sep, arg = text.partition(":")
    if not sep:
        raise InvalidInputError(f"node spec {text!r} must look like roots:<d>, counter:<d> or file:<path>")
    if kind in ("roots", "counter"):
        try:
            d = int(arg)
        except ValueError:
            raise InvalidInputError(f"node spec {text!r}: {arg!r} is not an integer") from None
        return roots_of_unity(d) if kind == "roots" else counterexample_family(d)
    if kind == "file":
        try:
            return read_nodes(arg)
        except OSError as exc:
            raise InvalidInputError(f"cannot read node file {arg!r}: {exc.strerror}") from None
    raise InvalidInputError(f"node spec {text!r}: unknown kind {kind!r}")


def _common(p):
    p.add_argument("--config", help="file of 'key = value' lines mirroring the flags")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", "-o", help="report path (default: stdout)")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rieszbounds",
                                     description="Exact and theoretical Riesz bounds of periodic exponential systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="exact bounds from the Vandermonde SVD")
    p.add_argument("--nodes", required=True)
    _common(p)

    p = sub.add_parser("bound", help="evaluate a closed-form bound")
    p.add_argument("name", choices=sorted(n.replace("_", "-") for n in bounds.BOUNDS))
    for flag in ("--mu", "--delta", "--L", "--rho", "--mu-star", "--y", "--m", "--M",
                 "--y0", "--tau", "--a", "--A"):
        p.add_argument(flag, type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--nodes")
    _common(p)

    p = sub.add_parser("sweep", help="scan a triangular family over d")
    p.add_argument("--family", choices=mz.FAMILY_KINDS[:-1], default="canonical")
    p.add_argument("--dmin", type=int, default=1)
    p.add_argument("--dmax", type=int, default=64)
    p.add_argument("--mu-max", type=float)
    p.add_argument("--L", type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--mu-star", type=float)
    _common(p)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--dmin", type=int, default=1)
    p.add_argument("--dmax", type=int, default=64)
    p.add_argument("--mu-max", type=float, default=0.24)
    p.add_argument("--mu", type=float)
    p.add_argument("--family", choices=mz.FAMILY_KINDS[:-1], default="canonical")
    p.add_argument("--kmax", type=int, default=16)
    _common(p)

    p = sub.add_parser("a2", help="weight extrema and A2 estimate on a horizontal line")
    p.add_argument("--nodes", required=True)
    p.add_argument("--y", type=float, default=1.0)
    p.add_argument("--grid", type=int, default=analytic.DEFAULT_GRID)
    p.add_argument("--scale", type=float, default=1.0, help="largest interval, in periods")
    _common(p)

    p = sub.add_parser("phase", help="phase function grid and counting residual")
    p.add_argument("--nodes", required=True)
    p.add_argument("--y", type=float, default=1.0)
    p.add_argument("--grid", type=int, default=analytic.DEFAULT_GRID)
    p.add_argument("--window", type=float, help="also run the counting diagnostic on [-W, W]")
    _common(p)

    p = sub.add_parser("check-poisson", help="closed-form periodic Poisson kernel vs lattice sum")
    p.add_argument("--nt", type=int, default=32)
    p.add_argument("--ny", type=int, default=8)
    p.add_argument("--terms", type=int, default=10_000)
    _common(p)

    p = sub.add_parser("phi-decay", help="test-function bound for the sharpness example")
    p.add_argument("--L", type=int, nargs="+", default=[2, 3, 4, 5])
    _common(p)
    return parser


# --- config files ----------------------------------------------------------

def read_config(path, subparser) -> list[str]:
    """Translate ``key = value`` lines into command-line tokens."""
    known = {}
    for action in subparser._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                known[opt[2:]] = action
    tokens = []
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip().replace("_", "-"), value.strip()
        if not sep or not key:
            raise UsageError(f"{path}:{n}: expected 'key = value', got {raw.strip()!r}")
        if key not in known or key == "config":
            raise UsageError(f"{path}:{n}: unknown field {key!r}")
        tokens.append("--" + key)
        if known[key].nargs in ("+", "*"):
            tokens.extend(value.replace(",", " ").split())
        else:
            tokens.append(value)
    return tokens


def parse_args(argv):
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv[1:])
    if known.config and argv and argv[0] in COMMANDS:
        sub = parser._subparsers._group_actions[0].choices[argv[0]]
        # config first so explicit flags override it
        argv = argv[:1] + read_config(known.config, sub) + argv[1:]
    return parser.parse_args(argv)


# --- commands --------------------------------------------------------------

def _exact_record(theta):
    eb = exact_bounds(theta)
    return {"d": theta.d, "delta_circ": separation(theta), "A_exact": eb.A, "B_exact": eb.B,
            "log_A": eb.log_A, "log_B": eb.log_B, "sigma_min": eb.sigma_min,
            "sigma_max": eb.sigma_max}


def cmd_exact(args):
    theta = parse_nodes(args.nodes)
    return build_report("exact", {"nodes": args.nodes}, None, [_exact_record(theta)])


_BOUND_ARGS = {
    "kadec": ("mu",), "mz_kadec": ("mu",),
    "avdonin": ("delta", "L", "N", "mu_star"), "mz_avdonin": ("delta", "L", "N", "rho"),
    "sine_type": ("delta", "y", "m", "M"), "general_stability": ("delta", "y0", "tau"),
    "periodic": ("delta", "K"), "basis_perturbation": ("A", "delta", "mu"),
    "hs_ratio": ("m", "M"), "ingham": ("a", "delta"), "bessel": ("delta",),
    "gautschi": ("theta",),
}


def cmd_bound(args):
    name = args.name.replace("-", "_")
    params = {}
    for key in _BOUND_ARGS[name]:
        if key == "theta":
            if args.nodes is None:
                raise UsageError("bound gautschi needs --nodes")
            params["theta"] = parse_nodes(args.nodes)
            continue
        value = getattr(args, key)
        if value is None:
            raise UsageError(f"bound {args.name} needs --{key.replace('_', '-')}")
        params[key] = value
    rep = bounds.evaluate(name, **params)
    rec = {"name": rep.name, "kind": rep.kind, "value": rep.value, "log_value": rep.log_value}
    shown = {k: (args.nodes if k == "theta" else v) for k, v in params.items()}
    return build_report("bound", {"name": name, **shown}, None, [rec])


def _family(args):
    params = {}
    if args.family == "kadec_perturbed":
        params = {"mu_max": _need(args, "mu_max")}
    elif args.family == "avdonin_block":
        params = {"L": _need(args, "L"), "N": _need(args, "N"), "mu_star": _need(args, "mu_star")}
    return mz.TriangularFamily(args.family, params, seed=args.seed)


def _need(args, key):
    value = getattr(args, key, None)
    if value is None:
        raise UsageError(f"--{key.replace('_', '-')} is required here")
    return value


def cmd_sweep(args):
    fam = _family(args)
    scan = mz.mz_scan(fam, range(args.dmin, args.dmax + 1))
    params = {"family": fam.kind, **fam.params, "dmin": args.dmin, "dmax": args.dmax,
              "aggregates": scan.summary()}
    report = build_report("sweep", params, args.seed, scan.rows())
    report["csv_columns"] = mz.SCAN_COLUMNS
    return report


def cmd_verify(args):
    d_values = range(args.dmin, args.dmax + 1)
    if args.suite == "kadec":
        rep = mz.mz_kadec_verify(d_values, args.mu_max, args.trials, args.seed)
    elif args.suite == "general-kadec":
        fam = _family(args)
        rep = mz.mz_general_kadec_verify(fam, _need(args, "mu"), d_values, args.trials, args.seed)
    elif args.suite == "avdonin":
        rep = mz.mz_avdonin_verify(args.trials, args.seed, d_max=args.dmax)
    elif args.suite == "sine-type":
        rep = suites.sine_type_verify(args.trials, args.seed, K_max=args.kmax)
    elif args.suite == "gautschi":
        rep = suites.gautschi_verify(args.trials, args.seed, d_max=args.dmax)
    else:
        rep = suites.phi_decay_verify()
    return rep.as_report()


def _spectrum(args):
    return PeriodicSpectrum(parse_nodes(args.nodes))


def cmd_a2(args):
    spec = _spectrum(args)
    w = analytic.periodic_weight(spec, args.y, args.grid)
    m, M = analytic.weight_extrema(w)
    a2 = analytic.a2_constant(w, args.scale)
    rec = {"period": spec.period, "y": args.y, "m": m, "M": M, "ratio": m / M,
           "a2_lower_estimate": a2, "max_scale_periods": args.scale}
    report = build_report("a2", {"nodes": args.nodes, "y": args.y, "grid": args.grid}, None, [rec])
    report["grid"] = (w.x, w.samples, {"period": w.period, "y": args.y, "grid_size": w.grid_size,
                                       "quantity": "weight", "quadrature": "trapezoid"})
    return report


def cmd_phase(args):
    spec = _spectrum(args)
    ph = analytic.phase_alpha(spec, args.y, args.grid)
    rec = {"period": ph.period, "y": ph.y, "alpha_end": ph.end_value,
           "alpha_min": float(ph.samples.min()), "alpha_max": float(ph.samples.max())}
    if args.window is not None:
        _, rec["consistency_residual"] = analytic.counting_diagnostic(spec, args.y, args.window, args.grid)
    report = build_report("phase", {"nodes": args.nodes, "y": args.y, "grid": args.grid,
                                    "window": args.window}, None, [rec])
    report["grid"] = (ph.x, ph.samples, {"period": ph.period, "y": ph.y, "grid_size": ph.grid_size,
                                         "quantity": "alpha", "quadrature": ph.quadrature})
    return report


def cmd_check_poisson(args):
    records = []
    ys = np.geomspace(0.05, 4.0, args.ny)
    ts = np.linspace(-0.5, 0.5, args.nt)
    for y in ys:
        closed = analytic.poisson_kernel_periodic(ts, y)
        direct = analytic.poisson_kernel_direct(ts, y, terms=args.terms)
        tail = analytic.poisson_tail_bound(ts, y, terms=args.terms)
        for t, c, s, b in zip(ts, closed, direct, tail):
            err = c - s
            # closed form exceeds the truncated sum by at most the tail
            ok = -1e-12 * c <= err <= b + 1e-12 * c
            records.append({"t": t, "y": y, "closed": c, "truncated": s, "tail_bound": b,
                            "margin_log": math.log(b + 1e-300) - math.log(max(abs(err), 1e-300)),
                            "pass": bool(ok)})
    for y in (2.0, 3.0, 4.0):
        for t in ts:
            v = analytic.poisson_kernel_periodic(t, y)
            lim = 6 * math.pi * math.exp(-2 * math.pi * y)
            records.append({"t": t, "y": y, "closed": v, "limit": math.pi, "tail_bound": lim,
                            "margin_log": math.log(lim) - math.log(max(abs(v - math.pi), 1e-300)),
                            "pass": abs(v - math.pi) <= lim})
    return build_report("check-poisson", {"nt": args.nt, "ny": args.ny, "terms": args.terms},
                        None, records)


def cmd_phi_decay(args):
    rep = suites.phi_decay_verify(args.L)
    return build_report("phi-decay", {"L": list(args.L)}, None, rep.records)


COMMANDS = {"exact": cmd_exact, "bound": cmd_bound, "sweep": cmd_sweep, "verify": cmd_verify,
            "a2": cmd_a2, "phase": cmd_phase, "check-poisson": cmd_check_poisson,
            "phi-decay": cmd_phi_decay}


def render(report, fmt) -> str:
    grid = report.pop("grid", None)
    columns = report.pop("csv_columns", None)
    if fmt == "json":
        return dumps(report) + "\n"
    if grid is not None:
        return grid_to_csv(*grid)
    return records_to_csv(report["records"], columns)


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
    except SystemExit as exc:  # argparse already printed its diagnostic
        return EXIT_PARSE if exc.code else EXIT_OK
    except UsageError as exc:
        print(f"rieszbounds: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        report = COMMANDS[args.command](args)
    except (UsageError, InvalidInputError) as exc:
        print(f"rieszbounds {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NumericError as exc:
        print(f"rieszbounds {args.command}: numeric error: {exc} (args: {vars(args)})", file=sys.stderr)
        return EXIT_NUMERIC
    text = render(report, args.format)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if args.command == "verify" and report["summary"]["fail_count"]:
        return EXIT_FAIL
    return EXIT_OK


def main():
    sys.exit(run())
