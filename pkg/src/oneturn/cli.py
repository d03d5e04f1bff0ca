"""Command-line front end.

Subcommands
    classify <document.toml>      combinatorial classification of a
                                  polycycle document, then (when the
                                  assembly preconditions hold) the
                                  return-map verdict and a numeric scan.
    analyze dulac compose|invert  exact series arithmetic on literals.
    analyze ch <document.toml>    kernel synthesis from declared jumps:
                                  transform trace and residual summary.
    analyze pl simple             the explicit decay certificate.

Exit codes: 0 success, 1 input/engineering error, 2 analytic refusal.
Reports are deterministic: sorted JSON keys, no timestamps, CSV numerics
in 17-significant-digit scientific notation, so identical inputs give
byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass

from .cauchy_heine import (
    QuadratureConfig,
    ch_trace_csv,
    ch_transform,
    jump_residual,
    trivialization_residual,
)
from .cochains import jumps_from_config, synthesize_simple
from .dichotomy import (
    FIXED_POINT_FREE,
    REFUSED,
    dichotomy_verdict,
    fixed_point_scan,
)
from .errors import AnalyticRefusal, InputError, OneturnError
from .phragmen import certificate_json, simple_cochain_certificate
from .polycycle import assemble_return_map, classify, parse_polycycle
from .series import format_series, parse_series, series_compose, series_invert

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_REFUSAL = 2

OUT_DIR_ENV = "ONETURN_OUT"


@dataclass(frozen=True)
class RunConfig:
    """Run-wide knobs shared by the subcommands."""

    order: int = 8
    tol: float = 1e-10
    guard: float = 1.0
    out_dir: str = "."
    precision: str = "binary64"

    def __post_init__(self):
        if self.order < 1:
            raise InputError("truncation order must be at least 1")
        if not self.tol > 0:
            raise InputError("quadrature tolerance must be positive")
        if self.precision != "binary64":
            raise InputError("only binary64 precision is built")


def _sci(v: float) -> str:
    return f"{float(v):.16e}"


def _write_json(path: str, doc) -> None:
    with open(path, "w") as handle:
        json.dump(doc, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _out_path(cfg: RunConfig, name: str) -> str:
    os.makedirs(cfg.out_dir, exist_ok=True)
    return os.path.join(cfg.out_dir, name)


def _parse_mu_list(text: str):
    try:
        mus = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise InputError(f"bad --mu-list {text!r}: {exc}") from None
    return mus or (1.0,)


def cmd_classify(path: str, cfg: RunConfig, grid: int = 41, mu_list=(1.0,)) -> int:
    """Classification report, and the verdict + scan when assembly runs.

    The classification JSON is always written.  When the corollary
    preconditions fail, the run stops there with a classification-only
    report (that is a successful outcome, not an error).  A Refused
    verdict exits 2 so automation can tell refusals from crashes.
    """
    with open(path) as handle:
        document = handle.read()
    poly = parse_polycycle(document)
    result = classify(poly)
    report = result.report()

    if not result.corollary_applies:
        report["assembly"] = "not attempted: corollary preconditions fail"
        _write_json(_out_path(cfg, "classification.json"), report)
        return EXIT_OK
    report["assembly"] = "attempted"
    _write_json(_out_path(cfg, "classification.json"), report)

    expr = assemble_return_map(poly)
    verdict, trace = dichotomy_verdict(expr, guard=cfg.guard)
    doc = {"verdict": verdict.to_json(), "trace": trace.to_json()}

    if verdict.kind == FIXED_POINT_FREE and verdict.x0 is not None:
        lo, hi = verdict.x0, verdict.x0 + 10.0
    else:
        lo, hi = 5.0, 15.0
    scan = fixed_point_scan(
        expr, lo, hi, grid=grid, mu_list=mu_list, guard=cfg.guard
    )
    doc["scan"] = scan.to_json()
    _write_json(_out_path(cfg, "verdict.json"), doc)

    with open(_out_path(cfg, "scan.csv"), "w", newline="") as handle:
        writer = csv.writer(handle)
        for row in scan.csv_rows():
            writer.writerow(row)

    return EXIT_REFUSAL if verdict.kind == REFUSED else EXIT_OK


def cmd_analyze_dulac(op: str, literals, cfg: RunConfig) -> int:
    # a literal denotes an exact finite sum: absent coefficients are
    # exactly zero, so padding to the requested order loses nothing
    series = [parse_series(text, order=cfg.order) for text in literals]
    if op == "compose":
        out = series_compose(series[0], series[1], cfg.order)
    else:
        out = series_invert(series[0], cfg.order)
    print(format_series(out))
    return EXIT_OK


def cmd_analyze_ch(path: str, cfg: RunConfig, zeta: complex) -> int:
    """Synthesize from a jump document; emit trace CSV and residuals."""
    try:
        import tomllib
    except ModuleNotFoundError:  # pragma: no cover
        import tomli as tomllib
    with open(path, "rb") as handle:
        doc = tomllib.load(handle)
    a = float(doc.get("a", 0.0))
    eps = float(doc.get("eps", 0.3))
    n_lines = int(doc.get("n_lines", 8))
    series_block = doc.get("series", {})
    S = parse_series(str(series_block.get("literal", "z")), order=cfg.order)
    jumps = jumps_from_config(doc.get("jumps", []))
    quad = QuadratureConfig(tol=cfg.tol)
    f = synthesize_simple(a, S, jumps, quad, eps=eps, n_lines=n_lines)

    ch_trace_csv(f, zeta, _out_path(cfg, "ch_trace.csv"), quad)

    res = ch_transform(f, zeta, quad)
    summary = {
        "zeta": [zeta.real, zeta.imag],
        "transform": [res.value.real, res.value.imag],
        "error_estimate": res.error_estimate,
        "truncation_point": res.truncation_point,
        "jump_residuals": {},
        "trivialization_residuals": {},
    }
    for entry in jumps.entries:
        arc = f.partition.arc(entry.arc_id)
        rows = []
        for dx in (1.0, 2.0, 3.0, 4.0, 5.0):
            z = complex(arc.x_start + dx, arc.y)
            rows.append(
                {
                    "re": z.real,
                    "jump_residual": jump_residual(f, arc, z, quad),
                    "trivialization_residual": trivialization_residual(
                        f, z, quad
                    ),
                }
            )
        summary["jump_residuals"][entry.arc_id] = [
            {"re": r["re"], "value": r["jump_residual"]} for r in rows
        ]
        summary["trivialization_residuals"][entry.arc_id] = [
            {"re": r["re"], "value": r["trivialization_residual"]} for r in rows
        ]
    _write_json(_out_path(cfg, "ch_summary.json"), summary)
    return EXIT_OK


def cmd_analyze_pl(
    cfg: RunConfig,
    C3: float,
    sup_f: float,
    C_part: float,
    xmin: float,
    xmax: float,
    n_points: int,
) -> int:
    if not xmin < xmax:
        raise InputError("--xmin must be below --xmax")
    if n_points < 2:
        raise InputError("--grid needs at least two points")
    cert = simple_cochain_certificate(C3, sup_f, C_part)
    with open(_out_path(cfg, "pl_certificate.csv"), "w", newline="") as handle:
        handle.write("x,log_bound,bound\n")
        for i in range(n_points):
            x = xmin + (xmax - xmin) * i / (n_points - 1)
            lb = cert.log_bound(x)
            handle.write(f"{_sci(x)},{_sci(lb)},{_sci(cert.bound(x))}\n")
    with open(_out_path(cfg, "pl_certificate.json"), "w") as handle:
        handle.write(certificate_json(cert))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=int, default=8, help="truncation order N")
    common.add_argument("--tol", type=float, default=1e-10, help="quadrature tolerance")
    common.add_argument("--guard", type=float, default=1.0, help="tower guard budget")
    common.add_argument(
        "--out",
        default=None,
        help=f"output directory (default: ${OUT_DIR_ENV} or '.')",
    )

    parser = argparse.ArgumentParser(
        prog="oneturn",
        description="polycycle return-map classification and cochain analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_classify = sub.add_parser(
        "classify", parents=[common], help="classify a polycycle document"
    )
    p_classify.add_argument("document")
    p_classify.add_argument("--grid", type=int, default=41, help="scan grid points")
    p_classify.add_argument("--mu-list", default="1.0", help="comma-separated mu values")

    p_analyze = sub.add_parser("analyze", help="series, transform, and bound tools")
    asub = p_analyze.add_subparsers(dest="tool", required=True)

    p_dulac = asub.add_parser("dulac", parents=[common], help="exact series arithmetic")
    p_dulac.add_argument("op", choices=["compose", "invert"])
    p_dulac.add_argument("literals", nargs="+", metavar="series")

    p_ch = asub.add_parser("ch", parents=[common], help="kernel synthesis diagnostics")
    p_ch.add_argument("document")
    p_ch.add_argument("--zeta", default="3.0", help="evaluation point (complex literal)")

    p_pl = asub.add_parser("pl", parents=[common], help="decay certificates")
    p_pl.add_argument("kind", choices=["simple"])
    p_pl.add_argument("--C3", type=float, required=True)
    p_pl.add_argument("--sup-f", type=float, default=1.0, dest="sup_f")
    p_pl.add_argument("--c-part", type=float, default=1.0, dest="c_part")
    p_pl.add_argument("--xmin", type=float, default=10.0)
    p_pl.add_argument("--xmax", type=float, default=40.0)
    p_pl.add_argument("--grid-n", type=int, default=61, dest="grid_n",
                      help="CSV sample count")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    out_dir = args.out or os.environ.get(OUT_DIR_ENV) or "."
    try:
        cfg = RunConfig(
            order=args.order, tol=args.tol, guard=args.guard, out_dir=out_dir
        )
        if args.command == "classify":
            return cmd_classify(
                args.document, cfg, grid=args.grid,
                mu_list=_parse_mu_list(args.mu_list),
            )
        if args.tool == "dulac":
            want = 2 if args.op == "compose" else 1
            if len(args.literals) != want:
                raise InputError(
                    f"dulac {args.op} takes exactly {want} series literal(s)"
                )
            return cmd_analyze_dulac(args.op, args.literals, cfg)
        if args.tool == "ch":
            try:
                zeta = complex(args.zeta)
            except ValueError:
                raise InputError(f"bad --zeta {args.zeta!r}") from None
            return cmd_analyze_ch(args.document, cfg, zeta)
        return cmd_analyze_pl(
            cfg, args.C3, args.sup_f, args.c_part, args.xmin, args.xmax,
            args.grid_n,
        )
    except AnalyticRefusal as exc:
        hypothesis = getattr(exc, "failing_hypothesis", None)
        suffix = f" [failing hypothesis: {hypothesis}]" if hypothesis else ""
        print(f"refused: {exc}{suffix}", file=sys.stderr)
        return EXIT_REFUSAL
    except OneturnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
