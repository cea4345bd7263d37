"""Command-line front end.

    python3 -m tfham solve --alpha 3/4 --h -4/5 --order 10
    python3 -m tfham hcurve --alpha 3/4 --order 20 --h-min -1.2 --h-max -0.05 --samples 24
    python3 -m tfham pade --m 10 --alpha 3/4 --h -3/4
    python3 -m tfham reference --bracket -1.6 -1.5
    python3 -m tfham reproduce table1 --max-order 20

Exit status: 0 success (and every checked row matched), 1 a reproduction
finished with a Mismatch row, 2 usage error, 3 computation failure.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

from . import published_values as pc
from . import report
from .basis_series import DEFAULT_PRECISION, BasisParams, NumericMode, parse_number, series_eval
from .errors import TFHamError
from .ham_engine import OPERATOR_VARIANTS, HamConfig, partial_sum, run
from .reference_solver import ShootingConfig, find_initial_slope, sample_solution

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_FAILURE = 3


def _rational(text):
    try:
        return parse_number(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _grid(text):
    try:
        return [parse_number(v) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from exc


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _add_global(p):
    p.add_argument("--precision", type=int, default=DEFAULT_PRECISION, help="mpfr bits in float mode")
    p.add_argument("--mode", choices=("exact", "float"), default="float")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"))


def _add_basis(p, h_default=None, alpha_default="3/4"):
    p.add_argument("--alpha", type=_rational, default=parse_number(alpha_default))
    p.add_argument("--beta", type=_rational, default=Fraction(1))
    p.add_argument("--gamma", type=_rational, default=Fraction(1))
    p.add_argument("--operator", choices=OPERATOR_VARIANTS, default="consistent")
    if h_default is not None:
        p.add_argument("--h", type=_rational, default=parse_number(h_default))


def _add_shooting(p):
    d = ShootingConfig()
    p.add_argument("--x-start", type=float, default=d.x_start)
    p.add_argument("--x-max", type=float, default=d.x_max)
    p.add_argument("--ode-tol", type=float, default=d.ode_tol)
    p.add_argument("--bracket", type=float, nargs=2, metavar=("LOW", "HIGH"), default=d.slope_bracket)
    p.add_argument("--bracket-tol", type=float, default=d.bracket_tol)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tfham", description="Homotopy series for the Thomas-Fermi equation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the deformation recursion and summarize it")
    _add_global(p)
    _add_basis(p, h_default="-4/5")
    p.add_argument("--order", type=_nonneg_int, required=True)
    p.add_argument("--eval-grid", type=_grid, help="comma-separated x values for a solution table")
    p.add_argument("--timings", action="store_true", help="include wall-clock seconds per order")

    p = sub.add_parser("hcurve", help="slope and curvature at u=0 as functions of h")
    _add_global(p)
    _add_basis(p)
    p.add_argument("--order", type=_nonneg_int, default=pc.HCURVE_ORDER)
    p.add_argument("--h-min", type=_rational, default=parse_number("-1.2"))
    p.add_argument("--h-max", type=_rational, default=parse_number("-0.05"))
    p.add_argument("--samples", type=_positive_int, default=24)
    p.add_argument("--jobs", type=_positive_int, default=1)

    p = sub.add_parser("pade", help="diagonal Pade values of the slope series")
    _add_global(p)
    _add_basis(p, h_default="-3/4")
    p.add_argument("--m", type=_nonneg_int, required=True)

    p = sub.add_parser("reference", help="shooting solution of the boundary-value problem")
    _add_global(p)
    _add_shooting(p)

    p = sub.add_parser("reproduce", help="recompute a published table or figure and compare")
    _add_global(p)
    p.add_argument("target", choices=("table1", "table2", "figure1", "hcurves"))
    p.add_argument("--max-order", type=_nonneg_int, default=50)
    p.add_argument("--max-m", type=_nonneg_int, default=10)
    p.add_argument("--long", action="store_true", help="include the high-order rows (slow)")
    p.add_argument("--h", type=_rational, help="override the h used for the target")
    p.add_argument("--samples", type=_positive_int, default=24, help="hcurves sweep size")
    p.add_argument("--jobs", type=_positive_int, default=1)
    return parser


def _mode(args) -> NumericMode:
    if args.mode == "exact":
        return NumericMode()
    return NumericMode.approx(args.precision)


def _basis(parser, args) -> BasisParams:
    try:
        return BasisParams(args.alpha, args.beta, args.gamma)
    except ValueError as exc:
        parser.error(str(exc))


def _config(parser, args, h, order) -> HamConfig:
    try:
        return HamConfig(_basis(parser, args), h, order, _mode(args), operator=args.operator)
    except ValueError as exc:
        parser.error(str(exc))


def _emit(args, text: str):
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2)


# commands -------------------------------------------------------------------

def cmd_solve(parser, args) -> int:
    cfg = _config(parser, args, args.h, args.order)
    seq = run(cfg)
    summary = report.run_summary(seq, timings=args.timings)
    rows = None
    if args.eval_grid:
        rows = _solution_rows(seq, args.eval_grid)
        summary["solution"] = rows
    if args.format == "csv":
        if rows is not None:
            _emit(args, report.rows_to_csv(["x", "u_ham", "u_ref", "abs_diff"], rows))
        else:
            cols = ["k", "slope_k", "curvature_k", "partial_slope", "partial_curvature"]
            data = [
                {"k": k, "slope_k": a, "curvature_k": b, "partial_slope": c, "partial_curvature": d}
                for k, (a, b, c, d) in enumerate(zip(summary["slope_per_order"], summary["curvature_per_order"],
                                                     summary["partial_slopes"], summary["partial_curvatures"]))
            ]
            _emit(args, report.rows_to_csv(cols, data))
    else:
        _emit(args, _dumps(summary))
    return EXIT_OK


def _solution_rows(seq, grid) -> list:
    u = partial_sum(seq, seq.n)
    hi = max(float(x) for x in grid)
    ref = find_initial_slope(ShootingConfig(x_max=max(ShootingConfig().x_max, hi)), grid=[])
    ref_pts = sample_solution(ref, [float(x) for x in grid])
    rows = []
    for x, (_, ur) in zip(grid, ref_pts):
        uh = series_eval(u, x)
        rows.append({"x": str(x), "u_ham": report.render(uh), "u_ref": repr(ur),
                     "abs_diff": f"{abs(float(uh) - ur):.3e}"})
    return rows


def cmd_hcurve(parser, args) -> int:
    if args.h_min >= args.h_max:
        parser.error("--h-min must be below --h-max")
    if args.h_max >= 0:
        parser.error("h must be negative")
    basis = _basis(parser, args)
    _config(parser, args, args.h_min, args.order)  # validate once
    hs = report.h_grid(args.h_min, args.h_max, args.samples)
    pts = report.h_curve(basis, hs, args.order, _mode(args), jobs=args.jobs)
    rows = [{"h": str(h), "slope": report.render(s), "curvature": report.render(c)} for h, s, c in pts]
    if args.format == "json":
        _emit(args, _dumps({"order": args.order, "alpha": str(basis.alpha), "rows": rows}))
    else:
        _emit(args, report.rows_to_csv(["h", "slope", "curvature"], rows))
    return EXIT_OK


def _table2_expected(basis: BasisParams, m: int):
    if basis != report.present_basis():
        return None
    return next((r for r in pc.TABLE2 if r.m == m), None)


def cmd_pade(parser, args) -> int:
    cfg = _config(parser, args, args.h, 2 * args.m)
    seq = run(cfg)
    ref = report.reference_slope()
    rows = []
    for row in report.pade_rows(seq, args.m, ref):
        m = row["m"]
        if args.m > 0 and m == 0:
            continue
        known = _table2_expected(cfg.basis, m)
        row["expected"] = known.slope if known else ""
        if row["method"] == "degenerate":
            row["verdict"] = "degenerate"
        elif known:
            chk = report.ReportRow(f"[{m},{m}]", Fraction(row["value"]) if cfg.mode.is_exact else float(row["value"]),
                                   known.slope, 2e-4)
            row["verdict"] = chk.verdict
        else:
            row["verdict"] = report.INFO
        rows.append(row)
    cols = ["m", "value", "expected", "err_pct", "method", "verdict"]
    if args.format == "json":
        _emit(args, _dumps({"h": str(cfg.h), "alpha": str(cfg.basis.alpha), "reference_slope": repr(ref),
                            "rows": rows}))
    else:
        _emit(args, report.rows_to_csv(cols, rows))
    return EXIT_OK


def cmd_reference(parser, args) -> int:
    try:
        cfg = ShootingConfig(args.x_start, args.x_max, args.ode_tol, tuple(args.bracket), args.bracket_tol)
    except TFHamError as exc:
        parser.error(str(exc))
    res = find_initial_slope(cfg)
    rows = [{"x": repr(float(x)), "u": repr(u)} for x, u in res.samples]
    if args.format == "csv":
        _emit(args, report.rows_to_csv(["x", "u"], rows))
    else:
        _emit(args, _dumps({
            "slope": repr(res.slope),
            "iterations": res.iterations,
            "bracket": [repr(v) for v in res.bracket],
            "config": {"x_start": cfg.x_start, "x_max": cfg.x_max, "ode_tol": cfg.ode_tol,
                       "slope_bracket": list(cfg.slope_bracket), "bracket_tol": cfg.bracket_tol},
            "samples": rows,
        }))
    return EXIT_OK


def cmd_reproduce(parser, args) -> int:
    if args.mode == "exact":
        parser.error("reproduce runs in float mode")
    prec = args.precision
    if args.target == "table1":
        cap = max(r.N for r in pc.TABLE1) if args.long else args.max_order
        rep = report.reproduce_table1(cap, h=args.h if args.h is not None else report.TABLE1_H, precision=prec)
    elif args.target == "table2":
        cap = max(r.m for r in pc.TABLE2) if args.long else args.max_m
        rep = report.reproduce_table2(cap, h=args.h, precision=prec)
    elif args.target == "figure1":
        rep = report.reproduce_figure1(h=args.h, precision=prec)
    else:
        rep = report.reproduce_hcurves(samples=args.samples, precision=prec, jobs=args.jobs)
    if args.format == "json":
        _emit(args, rep.to_json())
    else:
        _emit(args, rep.to_csv())
    sys.stderr.write(rep.checks_csv())
    return EXIT_OK if rep.ok else EXIT_MISMATCH


COMMANDS = {
    "solve": cmd_solve,
    "hcurve": cmd_hcurve,
    "pade": cmd_pade,
    "reference": cmd_reference,
    "reproduce": cmd_reproduce,
}


_NEG_RATIONAL = re.compile(r"^-(\d+/\d+|\d*\.?\d+(e-?\d+)?)$")


def _attach_negative_values(argv):
    """Glue ``--h -4/5`` into ``--h=-4/5``; argparse would read ``-4/5`` as a flag."""
    out = []
    for tok in argv:
        prev = out[-1] if out else ""
        if (_NEG_RATIONAL.match(tok) and prev.startswith("--") and "=" not in prev
                and prev != "--bracket"):
            out[-1] = f"{prev}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_attach_negative_values(argv))
    try:
        return COMMANDS[args.command](parser, args)
    except (TFHamError, ArithmeticError) as exc:
        sys.stderr.write(f"tfham: {type(exc).__name__}: {exc}\n")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
