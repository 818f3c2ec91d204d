"""Command-line interface: ``extsource <subcommand> [flags]``.

Every output starts with a header echoing the tool version, the subcommand
and the fully resolved flags. CSV headers are ``# ``-prefixed comment lines;
JSON documents carry them under ``"meta"``.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .curve import gaussian_curve
from .density import profile
from .mc import McConfig, cluster_edges, comparison_record, gaussian_profile, sample_spectrum_gaussian
from .params import NoAdmissibleParameters, solve_parameters
from .sheets import SHEET_COLUMNS, BranchClassificationError, SheetTracker, branch_structure
from .verify import full_report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    return obj


class Output:
    """Collects a header, a payload and optional CSV rows, then renders one format."""

    def __init__(self, meta: dict):
        self.meta = meta
        self.payload: dict = {}
        self.columns: tuple = ()
        self.rows: list = []
        self.notes: dict = {}

    def render(self, fmt: str) -> str:
        if fmt == "json":
            doc = {"meta": self.meta}
            doc.update(self.payload)
            return json.dumps(_clean(doc), indent=2) + "\n"
        buf = io.StringIO()
        buf.write(f"# extsource {self.meta['version']}\n")
        buf.write(f"# subcommand: {self.meta['subcommand']}\n")
        buf.write(f"# flags: {json.dumps(_clean(self.meta['flags']), sort_keys=True)}\n")
        buf.write(f"# seed: {self.meta['flags'].get('seed')}\n")
        for key, val in self.notes.items():
            buf.write(f"# {key}: {json.dumps(_clean(val))}\n")
        if self.columns:
            buf.write(",".join(self.columns) + "\n")
            for row in self.rows:
                buf.write(",".join(_fmt(v) if not isinstance(v, (str, int, np.integer)) or isinstance(v, bool)
                                   else str(v) for v in row) + "\n")
        else:
            buf.write("key,value\n")
            for key, val in _flatten(self.payload):
                buf.write(f"{key},{val}\n")
        return buf.getvalue()


def _flatten(d, prefix=""):
    for key, val in d.items():
        name = f"{prefix}{key}"
        if isinstance(val, dict):
            yield from _flatten(val, name + ".")
        elif isinstance(val, (float, np.floating)):
            yield name, _fmt(val)
        elif isinstance(val, (list, tuple)):
            yield name, json.dumps(_clean(val)).replace(",", ";")
        else:
            yield name, val


# -- subcommands ---------------------------------------------------------------------

def _curve_for(args):
    if args.field == "gaussian":
        return gaussian_curve(args.a, args.x2), None
    params = solve_parameters(args.a, args.tol)
    return params.curve(), params


def cmd_gaussian_curve(args, out: Output):
    curve = gaussian_curve(args.a, args.x2)
    branch = branch_structure(curve)
    tracker = SheetTracker(curve, branch)
    reach = 1.5 * max(abs(e) for e in branch.endpoints)
    xs = np.linspace(-reach, reach, args.grid)
    xs = xs[~np.isin(xs, branch.endpoints)]
    vals = tracker.real_upper_many(xs)
    out.payload = {"curve": curve.to_dict(), "branch": branch.to_dict()}
    out.notes = {"branch_points": branch.endpoints}
    out.columns = SHEET_COLUMNS
    out.rows = [(x, 0.0, v[0].real, v[0].imag, v[1].real, v[1].imag, v[2].real, v[2].imag)
                for x, v in zip(xs, vals)]
    return EXIT_OK


def cmd_quartic_solve(args, out: Output):
    params = solve_parameters(args.a, args.tol)
    branch = branch_structure(params.curve())
    diag = {"converged": params.grad_norm <= args.tol, "b2_ok": params.b2_residual <= args.tol,
            "square_factor_ok": branch.factor_residual <= 1e-6}
    diag["pass"] = all(diag.values())
    out.payload = {"alpha": params.alpha, "beta": params.beta, "gamma1": branch.gamma1,
                   "gamma2": branch.gamma2, "parameters": params.to_dict(),
                   "diagnostics": diag}
    return EXIT_OK if diag["pass"] else EXIT_FAIL


def cmd_verify(args, out: Output):
    report = full_report(args.a, args.field, args.x2, args.grid, args.tol)
    out.payload = {k: v for k, v in report.to_dict().items()}
    out.notes = {"pass": report.passed}
    out.columns = ("name", "worst", "pass")
    out.rows = [(c.name, c.worst, int(c.passed)) for c in report.checks]
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_density(args, out: Output):
    curve, _ = _curve_for(args)
    branch = branch_structure(curve)
    prof = profile(curve, branch, args.grid)
    cut = np.repeat([1, 2], args.grid)
    out.payload = prof.to_dict()
    out.notes = {"masses": prof.masses, "total_mass": prof.total_mass,
                 "support": prof.support}
    out.columns = ("x", "rho", "cut")
    out.rows = [(x, r, int(c)) for x, r, c in zip(prof.xs, prof.rho, cut)]
    return EXIT_OK


def cmd_mc(args, out: Output):
    cfg = McConfig(args.n, args.samples, args.seed, args.bins)
    batch = sample_spectrum_gaussian(cfg, args.a)
    prof = gaussian_profile(args.a, 0.5)
    record = comparison_record(batch, prof)
    record["cluster_edges"] = list(cluster_edges(batch))
    record["branch_points"] = [e for s in prof.support for e in s]
    out.payload = record
    out.notes = record
    out.columns = ("sample", "eigenvalue")
    out.rows = [(s, x) for s, row in enumerate(batch.eigenvalues) for x in row]
    return EXIT_OK


def cmd_report(args, out: Output):
    curve, params = _curve_for(args)
    branch = branch_structure(curve)
    prof = profile(curve, branch, args.grid)
    report = full_report(args.a, args.field, args.x2, args.grid, args.tol)
    out.payload = {
        "parameters": params.to_dict() if params else None,
        "branch": branch.to_dict(),
        "density": {"masses": prof.masses, "total_mass": prof.total_mass},
        "verification": {"pass": report.passed,
                         "failed": [c.name for c in report.checks if not c.passed]},
    }
    return EXIT_OK if report.passed else EXIT_FAIL


COMMANDS = {
    "gaussian-curve": cmd_gaussian_curve,
    "quartic-solve": cmd_quartic_solve,
    "verify": cmd_verify,
    "density": cmd_density,
    "mc": cmd_mc,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="extsource", description="Spectral curves for the external source model.")
    parser.add_argument("--version", action="version", version=f"extsource {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, a_default=None, field=False):
        p.add_argument("--a", type=float, required=a_default is None, default=a_default)
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None,
                       help="default: csv for .csv paths, json otherwise")
        p.add_argument("--tol", type=float, default=1e-12)
        if field:
            p.add_argument("--field", choices=("quartic", "gaussian"), default="quartic")
            p.add_argument("--x2", type=float, default=0.5)

    p = sub.add_parser("gaussian-curve", help="Gaussian curve, branch points and sheet values")
    common(p)
    p.add_argument("--x2", type=float, default=0.5)
    p.add_argument("--grid", type=int, default=201)
    p = sub.add_parser("quartic-solve", help="solve for the quartic parameters")
    common(p)
    p = sub.add_parser("verify", help="run every equilibrium check")
    common(p, field=True)
    p.add_argument("--grid", type=int, default=200)
    p = sub.add_parser("density", help="eigenvalue density on both cuts")
    common(p, field=True)
    p.add_argument("--grid", type=int, default=200)
    p = sub.add_parser("mc", help="Monte Carlo spectra against the Gaussian prediction")
    common(p, a_default=2.0)
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int, default=80)
    p = sub.add_parser("report", help="parameters, branch points, masses and check summary")
    common(p, field=True)
    p.add_argument("--grid", type=int, default=200)
    return parser


def _validate(args):
    if not math.isfinite(args.a) or args.a < 0:
        raise UsageError("--a must be a finite non-negative number")
    if args.subcommand != "mc" and args.a == 0:
        raise UsageError("--a must be positive")
    if getattr(args, "grid", 2) < 2:
        raise UsageError("--grid must be at least 2")
    if args.subcommand == "mc" and (args.n <= 0 or args.n % 2 or args.samples <= 0 or args.bins <= 0):
        raise UsageError("--n must be positive and even; --samples and --bins positive")
    if getattr(args, "x2", 0.5) <= 0 or getattr(args, "x2", 0.5) >= 1:
        raise UsageError("--x2 must lie in (0, 1)")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        _validate(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"extsource: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    fmt = args.format or ("csv" if args.out and args.out.endswith(".csv") else "json")
    flags = {k: v for k, v in vars(args).items() if k not in ("subcommand", "out", "format")}
    flags.setdefault("seed", None)
    out = Output({"version": __version__, "subcommand": args.subcommand, "flags": flags, "format": fmt})
    try:
        code = COMMANDS[args.subcommand](args, out)
    except (NoAdmissibleParameters, BranchClassificationError) as exc:
        print(f"extsource: {exc}", file=sys.stderr)
        out.payload = {"error": str(exc)}
        code = EXIT_FAIL
    text = out.render(fmt)
    if args.out:
        with open(args.out, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def run(argv=None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
