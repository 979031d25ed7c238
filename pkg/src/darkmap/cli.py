"""``darkmap`` command-line interface.

Reports go to stdout (or ``--report``); diagnostics go to stderr as one JSON
object ``{"error", "message", "exit_code"}``. Exit codes: 0 success, 1 a
verification or catalog expectation failed, 2 invalid input, 3 numerical
failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

import numpy as np

from . import catalog
from .darkstate import SIGMA_FLOOR
from .dressing import Tolerances
from .errors import DarkmapError, ValidationError
from .pipeline import Analysis, check_entry, run, run_entry
from .report import emit
from .system_model import parse_system
from .verifier import verify

EXIT_OK, EXIT_FAIL, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3, 4
TOL_RANK_ENV = "DARKMAP_TOL_RANK"


class CliIOError(Exception):
    exit_code = EXIT_IO


def _upper_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--upper expects comma-separated integers, got {text!r}") from exc


def _common(p: argparse.ArgumentParser, source: bool = True) -> None:
    if source:
        p.add_argument("input", nargs="?", help="system description (JSON); '-' reads stdin")
        p.add_argument("--catalog", metavar="NAME", help="use a catalog entry instead of a file")
        p.add_argument("--param", action="append", default=[], metavar="K=V",
                       help="catalog parameter (repeatable)")
    p.add_argument("--upper", type=_upper_list, help="comma-separated upper (target) levels")
    p.add_argument("--tol-degeneracy", type=float)
    p.add_argument("--tol-rank", type=float)
    p.add_argument("--tol-residual", type=float)
    p.add_argument("--report", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("--large-n", action="store_true", help="large-N coupling matrix for dsp")
    p.add_argument("--seed", type=int, help="seed for randomly drawn catalog couplings")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="darkmap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("analyze", help="count and construct dark states"))
    _common(sub.add_parser("verify", help="analyze, then check residuals and leakage"))
    _common(sub.add_parser("export-dot", help="dressed-state bipartite graph in DOT"))
    cat = sub.add_parser("catalog", help="built-in configurations")
    csub = cat.add_subparsers(dest="catalog_command", required=True)
    csub.add_parser("list", help="list catalog entries")
    run_p = csub.add_parser("run", help="run an entry and check it against its closed form")
    run_p.add_argument("name")
    run_p.add_argument("params", nargs="*", metavar="K=V")
    run_p.add_argument("--param", action="append", default=[], metavar="K=V")
    run_p.add_argument("--verify", action="store_true", help="also run the dynamical check")
    _common(run_p, source=False)
    return parser


def tolerances(args) -> Tolerances:
    base = Tolerances()
    tol_rank = base.tol_rank
    env = os.environ.get(TOL_RANK_ENV)
    if env:
        try:
            tol_rank = float(env)
        except ValueError as exc:
            raise ValidationError(f"{TOL_RANK_ENV}={env!r} is not a number") from exc
    if args.tol_rank is not None:
        tol_rank = args.tol_rank
    return Tolerances(
        args.tol_degeneracy if args.tol_degeneracy is not None else base.tol_degeneracy,
        tol_rank,
        args.tol_residual if args.tol_residual is not None else base.tol_residual,
    )


def _read_input(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliIOError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliIOError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _warn(message: str) -> None:
    print(json.dumps({"warning": message}), file=sys.stderr)


def _entry(name: str, items: Sequence[str], args) -> catalog.CatalogEntry:
    params = catalog.parse_params(items)
    if args.large_n:
        params["large_n"] = True
    return catalog.build(name, params, args.seed)


def _load(args, tol: Tolerances) -> tuple[Analysis, catalog.CatalogEntry | None]:
    if args.catalog and args.input:
        raise ValidationError("give either an input file or --catalog, not both")
    if args.catalog:
        entry = _entry(args.catalog, args.param, args)
        upper = args.upper or entry.partition.upper
        return run(entry.spec, upper, tol), entry
    if not args.input:
        raise ValidationError("an input file or --catalog NAME is required")
    spec = parse_system(_read_input(args.input))
    upper = spec.upper
    if args.upper:
        if upper is not None and sorted(upper) != sorted(args.upper):
            _warn(f"--upper {args.upper} overrides the document's upper {list(upper)}")
        upper = args.upper
    return run(spec, upper, tol), None


def _verify_section(analysis: Analysis) -> tuple[dict, bool]:
    result = verify(analysis.report, analysis.hamiltonian)
    if not result.passed:
        _warn(f"verification failed for dark states {result.failures()}")
    return result.as_dict(), result.passed


def cmd_analyze(args) -> int:
    tol = tolerances(args)
    analysis, _ = _load(args, tol)
    _write(emit(analysis.report), args.report)
    return EXIT_OK


def cmd_verify(args) -> int:
    tol = tolerances(args)
    analysis, _ = _load(args, tol)
    section, passed = _verify_section(analysis)
    _write(emit(analysis.report, section), args.report)
    return EXIT_OK if passed else EXIT_FAIL


def to_dot(analysis: Analysis) -> str:
    """Bipartite graph of dressed upper and lower states."""
    d = analysis.dressed
    report = analysis.report
    cut = report.tolerances.tol_rank * max(report.sigma_max, SIGMA_FLOOR)
    lines = ["graph dressed {", "  rankdir=LR;"]
    lines.append("  subgraph upper {")
    for i, e in enumerate(d.delta, start=1):
        lines.append(f'    U{i} [shape=box, label="U{i}\\n{e:.12g}"];')
    lines.append("  }")
    lines.append("  subgraph lower {")
    for k, e in enumerate(d.omega, start=1):
        lines.append(f'    L{k} [shape=ellipse, label="L{k}\\n{e:.12g}"];')
    lines.append("  }")
    mags = np.abs(d.coupling)
    for i in range(mags.shape[0]):
        for k in range(mags.shape[1]):
            if mags[i, k] > cut:
                lines.append(f'  U{i + 1} -- L{k + 1} [weight={mags[i, k]:.12g}, label="{mags[i, k]:.6g}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_export_dot(args) -> int:
    tol = tolerances(args)
    analysis, _ = _load(args, tol)
    _write(to_dot(analysis), args.report)
    return EXIT_OK


def cmd_catalog(args) -> int:
    if args.catalog_command == "list":
        width = max(len(n) for n in catalog.PRESETS)
        for name, preset in catalog.PRESETS.items():
            print(f"{name.ljust(width)}  {preset.description}")
        return EXIT_OK
    tol = tolerances(args)
    entry = _entry(args.name, list(args.params) + list(args.param), args)
    if args.upper:
        analysis = run(entry.spec, args.upper, tol)
        check = check_entry(entry, analysis.report)
    else:
        analysis, check = run_entry(entry, tol)
    extra = {"catalog": {"name": entry.name, **check.as_dict(), "diagnostics": entry.diagnostics}}
    verify_section, passed = None, True
    if args.verify:
        verify_section, passed = _verify_section(analysis)
    _write(emit(analysis.report, verify_section, **extra), args.report)
    if not check.passed:
        _warn(f"{entry.name}: expected {check.expected_count} dark states, "
              f"got {check.actual_count} (distance {check.distance})")
    return EXIT_OK if check.passed and passed else EXIT_FAIL


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message, "exit_code": code}), file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, 0 for --help
        return int(exc.code or 0)
    handlers = {
        "analyze": cmd_analyze,
        "verify": cmd_verify,
        "export-dot": cmd_export_dot,
        "catalog": cmd_catalog,
    }
    try:
        return handlers[args.command](args)
    except CliIOError as exc:
        return _fail("IOError", str(exc), EXIT_IO)
    except DarkmapError as exc:
        return _fail(type(exc).__name__, str(exc), exc.exit_code)
    except Exception as exc:  # noqa: BLE001 - every failure gets an exit code
        return _fail(type(exc).__name__, str(exc), EXIT_NUMERICAL)


if __name__ == "__main__":
    sys.exit(main())
