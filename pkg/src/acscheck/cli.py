"""Command-line interface.

Exit codes: 0 = consistent report / suite passed, 1 = operational error
(bad flags, unreadable file, singular metric, ...), 2 = the structure fails
the pointwise J^2 = -I check, 3 = ledger anomaly (expansion total and
contraction disagree at the requested tolerance; also used by `selftest`
for hard-invariant failures).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .expr import ExprError
from .geometry import GeometryError
from .obstruction import (
    VERDICT_CONSISTENT,
    VERDICT_INVALID_ACS,
    VERDICT_LEDGER_ANOMALY,
    identity_report,
)
from .scan import GridSpec, run_scan
from .selftest import run_selftest
from .structures import (
    StructureError,
    StructureFile,
    gallery,
    gallery_description,
    gallery_names,
    load_structure,
    serialize_structure,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INVALID_ACS = 2
EXIT_LEDGER_ANOMALY = 3

_VERDICT_EXIT = {
    VERDICT_CONSISTENT: EXIT_OK,
    VERDICT_INVALID_ACS: EXIT_INVALID_ACS,
    VERDICT_LEDGER_ANOMALY: EXIT_LEDGER_ANOMALY,
}


class _ArgumentParser(argparse.ArgumentParser):
    # usage problems are operational errors, not structure verdicts
    def error(self, message):
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _load(spec: str) -> StructureFile:
    if spec.startswith("gallery:"):
        return gallery(spec.split(":", 1)[1])
    return load_structure(spec)


def _parse_point(text: str, n: int) -> tuple[float, ...]:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != n:
        raise ValueError(f"point has {len(parts)} coordinates, chart has {n}")
    return tuple(float(p) for p in parts)


def _report_for(args) -> "tuple[int, str]":
    sf = _load(args.structure)
    point = _parse_point(args.point, sf.chart.n)
    rep = identity_report(
        sf.j_field,
        sf.metric,
        sf.chart,
        point,
        tol_alg=args.tol_alg,
        tol_identity=args.tol_identity,
    )
    if args.json:
        text = json.dumps(rep.to_json_dict(), indent=2) + "\n"
    else:
        text = rep.render_text(ledger_detail=args.ledger_detail)
    return _VERDICT_EXIT[rep.verdict], text


def _cmd_check(args) -> int:
    code, text = _report_for(args)
    sys.stdout.write(text)
    return code


def _cmd_scan(args) -> int:
    sf = _load(args.structure)
    grid = GridSpec.parse(args.grid)
    summary = run_scan(
        sf, grid, args.out, tol_alg=args.tol_alg, tol_identity=args.tol_identity
    )
    sys.stdout.write(summary.render_text())
    return EXIT_OK


def _cmd_gallery(args) -> int:
    if args.action == "list":
        for name in gallery_names():
            sys.stdout.write(f"{name:<16} {gallery_description(name)}\n")
        return EXIT_OK
    if not args.name:
        raise ValueError("gallery show needs a structure name")
    sys.stdout.write(serialize_structure(gallery(args.name)))
    return EXIT_OK


def _cmd_selftest(args) -> int:
    dims = tuple(int(d) for d in args.dims.split(","))
    report = run_selftest(dims, args.samples, args.degree, args.seed)
    sys.stdout.write(report.render_text())
    return EXIT_OK if report.all_passed() else EXIT_LEDGER_ANOMALY


def _add_point_arguments(p: argparse.ArgumentParser, ledger_detail: bool) -> None:
    p.add_argument("structure", help="structure file path, or gallery:<name>")
    p.add_argument(
        "--point", required=True, help="comma-separated coordinates, e.g. 0,0,0,0"
    )
    p.add_argument("--json", action="store_true", help="emit the JSON report")
    p.add_argument(
        "--tol-alg",
        type=float,
        default=1e-9,
        dest="tol_alg",
        help="tolerance for the J^2 = -I check (default 1e-9)",
    )
    p.add_argument(
        "--tol-identity",
        type=float,
        default=1e-9,
        dest="tol_identity",
        help="relative tolerance for ledger-vs-contraction (default 1e-9)",
    )
    p.set_defaults(ledger_detail=ledger_detail)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="acscheck",
        description=(
            "Numeric integrability diagnostics for almost-complex structures: "
            "Nijenhuis tensor, obstruction scalar, and the identity ledger "
            "relating them."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p_check = sub.add_parser("check", help="full report for one structure at one point")
    _add_point_arguments(p_check, ledger_detail=False)
    p_check.set_defaults(func=_cmd_check)

    p_verify = sub.add_parser(
        "verify-derivation",
        help="ledger-focused report: all sixteen expansion terms and residuals",
    )
    _add_point_arguments(p_verify, ledger_detail=True)
    p_verify.set_defaults(func=_cmd_check)

    p_scan = sub.add_parser("scan", help="evaluate a grid of points and write a CSV")
    p_scan.add_argument("structure", help="structure file path, or gallery:<name>")
    p_scan.add_argument(
        "--grid", required=True, help="per-axis lo:hi:count, comma separated"
    )
    p_scan.add_argument("--out", required=True, help="output CSV path")
    p_scan.add_argument("--tol-alg", type=float, default=1e-9, dest="tol_alg")
    p_scan.add_argument("--tol-identity", type=float, default=1e-9, dest="tol_identity")
    p_scan.set_defaults(func=_cmd_scan)

    p_gallery = sub.add_parser("gallery", help="list or print the built-in structures")
    p_gallery.add_argument("action", choices=("list", "show"))
    p_gallery.add_argument("name", nargs="?", default=None)
    p_gallery.set_defaults(func=_cmd_gallery)

    p_selftest = sub.add_parser("selftest", help="randomised invariant suite and residual tables")
    p_selftest.add_argument("--dims", default="2,4", help="comma-separated even dims")
    p_selftest.add_argument("--samples", type=int, default=25)
    p_selftest.add_argument("--degree", type=int, default=2)
    p_selftest.add_argument("--seed", type=int, default=0)
    p_selftest.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR
    except (StructureError, ExprError, GeometryError, OSError, ValueError) as exc:
        sys.stderr.write(f"acscheck: error: {exc}\n")
        return EXIT_ERROR


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
