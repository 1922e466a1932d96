"""Command-line front end.

Subcommands
-----------
energies       quantized energies and their error against -1/2n^2
orders         loop integrals of y_2 .. y_kmax by residues and by quadrature
wavefunction   exact and WKB radial functions on a grid, as CSV or JSON
dipole-table   semiclassical and exact dipole elements next to the reference table

Exit codes are 0 when every requested check passes, 1 when a check fails or a
computation errors out, and 2 for usage or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .atomic import DomainError, QuantumNumbers, Variant, energy_level
from .dipole import (
    REF_TABLE_ENV,
    EvalConvention,
    calibrate_convention,
    dipole_exact,
    load_reference_table,
    reference_table_path,
    report_for,
)
from .engine import MAX_ORDER, HierarchyTooLargeError, QuadratureAccuracyError
from .quantization import METHODS, QuantizationError, higher_order_report, quantize
from .wavefunctions import WkbWave, exact_radial

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2
WAVEFUNCTION_POINTS = 2001
WAVEFUNCTION_EXTENT = 1.3
EXACT_TABLE_TOL = 0.005


class ConfigError(Exception):
    """Bad input that argparse cannot catch: malformed ranges, missing files."""


@dataclass
class CommandOutput:
    columns: list[str]
    rows: list[dict]
    failures: list[str] = field(default_factory=list)
    meta: dict = field(default_factory=dict)


# argument parsing


def parse_range(text: str) -> list[int]:
    """``"3"``, ``"1..5"`` or ``"1,3,5"`` to a sorted list of distinct integers.

    Examples
    --------
    >>> parse_range("1..3,7")
    [1, 2, 3, 7]
    """
    values = set()
    try:
        for part in filter(None, (s.strip() for s in text.split(","))):
            lo, sep, hi = part.partition("..")
            if sep:
                values.update(range(int(lo), int(hi) + 1))
            else:
                values.add(int(part))
    except ValueError:
        raise ConfigError(f"bad integer range {text!r}; use forms like 3, 1..5 or 1,3,5") from None
    if not values:
        raise ConfigError(f"empty range {text!r}")
    return sorted(values)


def parse_state(text: str) -> QuantumNumbers:
    try:
        n, l = (int(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"bad state {text!r}; expected n,l") from None
    try:
        return QuantumNumbers(n, l)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def parse_variants(text: str) -> list[Variant]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    if names == ["all"]:
        return list(Variant)
    try:
        return [Variant.parse(s) for s in names]
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def selected_states(args) -> list[QuantumNumbers]:
    if args.state:
        return [parse_state(s) for s in args.state]
    if args.n is None:
        raise ConfigError("give --state n,l or an --n range")
    states = []
    for n in parse_range(args.n):
        ls = range(n) if args.l is None else [l for l in parse_range(args.l) if l < n]
        for l in ls:
            try:
                states.append(QuantumNumbers(n, l))
            except DomainError as exc:
                raise ConfigError(str(exc)) from None
    if not states:
        raise ConfigError("the --n/--l ranges select no valid state")
    return states


def _add_state_options(p: argparse.ArgumentParser):
    p.add_argument("--n", help="principal numbers, e.g. 3, 1..5 or 1,3,5")
    p.add_argument("--l", help="angular numbers (default: every l < n)")
    p.add_argument("--state", action="append", metavar="N,L", help="single state; may be repeated")


def _add_output_options(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format (default: csv)")
    p.add_argument("--out", type=Path, help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kepler-wkb",
        description="Semiclassical hydrogen: quantization, wave functions and dipole elements.",
        epilog=f"Exit codes: 0 ok, 1 failed check or computation, 2 usage error. "
        f"{REF_TABLE_ENV} overrides the reference table path.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("energies", help="quantized energies")
    p.add_argument("--variant", default="se", help="se, lm, pm, a comma list or all (default: se)")
    _add_state_options(p)
    p.add_argument("--order", type=int, default=1, help="highest k in the quantization sum (default: 1)")
    p.add_argument("--method", choices=METHODS, default="residues", help="loop-integral method (default: residues)")
    p.add_argument("--tol", type=float, help="fail unless every |E - E_exact| is at most this")
    _add_output_options(p)

    p = sub.add_parser("orders", help="higher-order loop integrals")
    p.add_argument("--variant", default="se", help="se, lm, pm, a comma list or all (default: se)")
    _add_state_options(p)
    p.add_argument("--kmax", type=int, default=4, help=f"highest order, at most {MAX_ORDER} (default: 4)")
    p.add_argument("--tol", type=float, help="fail unless every |loop integral| for k >= 2 is at most this")
    _add_output_options(p)

    p = sub.add_parser("wavefunction", help="exact and WKB radial functions on a grid")
    p.add_argument("--state", required=True, metavar="N,L")
    p.add_argument("--points", type=int, default=WAVEFUNCTION_POINTS, help=f"grid size (default: {WAVEFUNCTION_POINTS})")
    p.add_argument(
        "--extent",
        type=float,
        default=WAVEFUNCTION_EXTENT,
        help=f"grid runs over (0, extent * r2] with r2 the SE outer turning point (default: {WAVEFUNCTION_EXTENT})",
    )
    _add_output_options(p)

    p = sub.add_parser("dipole-table", help="reference dipole table against computed values")
    p.add_argument("--series", help="restrict to rows such as 2p-nd (comma list)")
    p.add_argument("--convention", help="pin a convention, e.g. initial or anchor=mean,order=0; skips calibration")
    p.add_argument("--table", type=Path, help=f"reference table file (default: ${REF_TABLE_ENV} or the bundled copy)")
    p.add_argument("--semi-tol", type=float, help="fail unless every semiclassical entry is within this")
    p.add_argument(
        "--exact-tol",
        type=float,
        default=EXACT_TABLE_TOL,
        help=f"tolerance for the exact column against the table (default: {EXACT_TABLE_TOL})",
    )
    _add_output_options(p)
    return parser


# commands


def cmd_energies(args) -> CommandOutput:
    out = CommandOutput(["variant", "n", "l", "order", "method", "energy", "abs_error", "solver_residual"], [])
    for variant in parse_variants(args.variant):
        for q in selected_states(args):
            res = quantize(variant, q.n_r, q.l, order=args.order, method=args.method)
            err = abs(res.energy - energy_level(q.n))
            out.rows.append(
                {
                    "variant": variant.value,
                    "n": q.n,
                    "l": q.l,
                    "order": args.order,
                    "method": args.method,
                    "energy": res.energy,
                    "abs_error": err,
                    "solver_residual": res.solver_residual,
                }
            )
            if args.tol is not None and not err <= args.tol:
                out.failures.append(f"{variant.value} {q.label()}: |E - E_exact| = {err:.3g} > {args.tol:g}")
    return out


def cmd_orders(args) -> CommandOutput:
    if args.kmax < 2:
        raise ConfigError("--kmax must be at least 2")
    cols = ["variant", "n", "l", "k", "residues_re", "residues_im", "quadrature_re", "quadrature_im", "magnitude", "difference"]
    out = CommandOutput(cols, [])
    for variant in parse_variants(args.variant):
        for q in selected_states(args):
            _, rows = higher_order_report(variant, q.n_r, q.l, args.kmax)
            for row in rows:
                out.rows.append(
                    {
                        "variant": variant.value,
                        "n": q.n,
                        "l": q.l,
                        "k": row.k,
                        "residues_re": row.residues.real,
                        "residues_im": row.residues.imag,
                        "quadrature_re": row.quadrature.real,
                        "quadrature_im": row.quadrature.imag,
                        "magnitude": row.magnitude,
                        "difference": abs(row.residues - row.quadrature),
                    }
                )
                if args.tol is not None and not row.magnitude <= args.tol:
                    out.failures.append(
                        f"{variant.value} {q.label()} k={row.k}: |loop integral| = {row.magnitude:.3g} > {args.tol:g}"
                    )
    return out


def wavefunction_grid(q: QuantumNumbers, points: int, extent: float) -> np.ndarray:
    r2 = WkbWave.build(Variant.SE, q).orbit.r2
    return np.linspace(0.0, extent * r2, points + 1)[1:]


def cmd_wavefunction(args) -> CommandOutput:
    q = parse_state(args.state)
    if args.points < 2 or not args.extent > 0:
        raise ConfigError("--points must be >= 2 and --extent positive")
    r = wavefunction_grid(q, args.points, args.extent)
    columns = {"r": r, "exact": exact_radial(q, r)}
    for v in Variant:
        columns[f"wkb_{v.value}"] = WkbWave.build(v, q)(r, exclusion="nan")
    # the trapezoid starts at r = 0 where u = 0
    norm = float(np.trapezoid(np.concatenate(([0.0], columns["exact"] ** 2)), np.concatenate(([0.0], r))))
    out = CommandOutput(list(columns), [dict(zip(columns, vals)) for vals in zip(*columns.values())])
    out.meta = {"state": q.label(), "r_max": float(r[-1]), "exact_norm_on_grid": norm}
    return out


def cmd_dipole_table(args) -> CommandOutput:
    path = args.table or reference_table_path()
    try:
        entries = load_reference_table(path)
    except FileNotFoundError:
        raise ConfigError(f"reference table not found: {path}") from None
    except ValueError as exc:
        raise ConfigError(f"cannot parse reference table {path}: {exc}") from None
    if args.series:
        wanted = {s.strip() for s in args.series.split(",") if s.strip()}
        unknown = wanted - {e.series for e in entries}
        if unknown:
            raise ConfigError(f"unknown series {sorted(unknown)}")
        selected = [e for e in entries if e.series in wanted]
    else:
        selected = entries

    if args.convention:
        try:
            conv = EvalConvention.parse(args.convention)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None
        calibration = None
    else:
        calibration = calibrate_convention(entries)
        conv = calibration.convention
    report = report_for(conv, selected)

    cols = ["series", "n", "transition", "semiclassical", "table_semiclassical", "deviation", "exact", "table_exact", "exact_deviation"]
    out = CommandOutput(cols, [])
    for e, value in report.rows:
        exact = dipole_exact(e.transition.state, e.transition.target)
        row = {
            "series": e.series,
            "n": e.n,
            "transition": e.transition.label(),
            "semiclassical": value,
            "table_semiclassical": e.semiclassical,
            "deviation": value - e.semiclassical,
            "exact": exact,
            "table_exact": e.exact,
            "exact_deviation": exact - e.exact,
        }
        out.rows.append(row)
        if not abs(row["exact_deviation"]) <= args.exact_tol:
            out.failures.append(f"{e.series} n={e.n}: exact {exact:.6g} vs table {e.exact}")
        if args.semi_tol is not None and not abs(row["deviation"]) <= args.semi_tol:
            out.failures.append(f"{e.series} n={e.n}: semiclassical {value:.6g} vs table {e.semiclassical}")
    out.meta = {
        "convention": conv.label(),
        "calibrated": calibration is not None,
        "max_deviation": report.max_deviation,
        "mean_abs_deviation": report.mean_abs_deviation,
    }
    if calibration is not None:
        out.meta["full_table_max_deviation"] = calibration.max_deviation
        out.meta["full_table_mean_abs_deviation"] = calibration.mean_abs_deviation
    return out


COMMANDS = {
    "energies": cmd_energies,
    "orders": cmd_orders,
    "wavefunction": cmd_wavefunction,
    "dipole-table": cmd_dipole_table,
}


# output


def format_value(value) -> str:
    """Fixed text form: %.12g for floats, ``nan`` for NaN."""
    if isinstance(value, (float, np.floating)):
        # adding 0.0 folds -0.0 into 0.0
        return "nan" if math.isnan(value) else "%.12g" % (value + 0.0)
    return str(value)


def _json_value(value):
    if isinstance(value, (float, np.floating)):
        return None if math.isnan(value) else float("%.12g" % value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def render(result: CommandOutput, fmt: str, command: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(result.columns)
        for row in result.rows:
            writer.writerow(format_value(row[c]) for c in result.columns)
        return buf.getvalue()
    doc = {
        "command": command,
        "ok": not result.failures,
        "failures": result.failures,
        "meta": {k: _json_value(v) for k, v in result.meta.items()},
        "columns": result.columns,
        "rows": [{c: _json_value(row[c]) for c in result.columns} for row in result.rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = COMMANDS[args.command](args)
    except (ConfigError, HierarchyTooLargeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, QuantizationError, QuadratureAccuracyError) as exc:
        message = f"{type(exc).__name__}: {exc}"
        if args.format == "json":
            _emit(json.dumps({"command": args.command, "ok": False, "failures": [message]}, indent=2) + "\n", args.out)
        print(f"error: {message}", file=sys.stderr)
        return EXIT_FAILED
    try:
        _emit(render(result, args.format, args.command), args.out)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for key, value in result.meta.items():
        print(f"# {key} = {format_value(value)}", file=sys.stderr)
    for failure in result.failures:
        print(f"FAIL {failure}", file=sys.stderr)
    return EXIT_FAILED if result.failures else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
