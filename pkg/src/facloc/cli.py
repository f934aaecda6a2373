"""Command-line front end.

Exit codes: 0 when every checked bound holds, 1 on usage errors, 2 when a
bound or truthfulness check fails, 3 when a scan exceeds its budget.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Iterable

from facloc.analysis import (
    VIOLATION_TOL,
    BudgetExceededError,
    ErrorReport,
    additive_error,
    deterministic_probe_k,
    deterministic_probe_single,
    paper_bound,
    randomized_lb_certificate,
    truthfulness_check,
    worst_case_scan,
)
from facloc.core import AVERAGE_COST, MAX_COST, LocationProfile, Objective, Placement, average_cost, max_cost
from facloc.mechanisms import MechanismSpec
from facloc.optimal import optimum

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_BUDGET = 0, 1, 2, 3
REPORT_COLUMNS = ("mechanism", "objective", "n", "k", "measured", "bound", "status")

REPORT_SINGLE = (
    ("lrc", 1 / 4),
    ("blrc", 1 / 6),
    ("phantom-half", 1 / 4),
    ("dictator:i=1", 1 / 2),
    ("fixed:p=0.5", 1 / 2),
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    if isinstance(x, (list, tuple)):
        return "(" + ", ".join(fmt(v) for v in x) + ")"
    return str(x)


def _profile(text: str) -> LocationProfile:
    try:
        return LocationProfile(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad profile {text!r}: {exc}") from None


def _mechanism(text: str) -> MechanismSpec:
    try:
        return MechanismSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _grid(text: str) -> float:
    g = float(text)
    if not 0.0 < g <= 0.5:
        raise argparse.ArgumentTypeError("grid must lie in (0, 0.5]")
    return g


def _objective(args) -> Objective:
    return Objective.parse(args.objective, args.convention)


class Emitter:
    """Writes records as JSON lines, CSV rows or aligned text."""

    def __init__(self, output: str, stream=None):
        self.output = output
        self.stream = stream or sys.stdout

    def records(self, rows: Iterable[dict], columns: Iterable[str] | None = None) -> None:
        rows = list(rows)
        if self.output == "json":
            for row in rows:
                self.stream.write(json.dumps(row) + "\n")
            return
        if not rows:
            return
        cols = list(columns or rows[0].keys())
        if self.output == "csv":
            w = csv.writer(self.stream, lineterminator="\n")
            w.writerow(cols)
            for row in rows:
                w.writerow([_flat(row.get(c)) for c in cols])
            return
        for row in rows:
            self.stream.write("  ".join(f"{c}={fmt(row.get(c))}" for c in cols) + "\n")


def _flat(v) -> str:
    if isinstance(v, dict):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return " ".join(fmt(x) for x in v)
    return fmt(v)


def _report_row(rep: ErrorReport, bound: float | None, status: str) -> dict:
    d = rep.to_dict()
    d["objective"] = str(rep.objective)
    d["bound"] = bound
    d["status"] = status
    return d


def cmd_eval(args) -> int:
    mech, profile = args.mech, args.profile
    out = mech(profile)
    if isinstance(out, Placement):
        rows = [{"location": list(out.locations), "probability": 1.0}]
    else:
        rows = [{"location": list(p.locations), "probability": w} for p, w in out.atoms]
    obj_max = Objective.parse("max", args.convention)
    summary = {
        "mechanism": mech.name,
        "profile": list(profile.reports),
        "max_cost": max_cost(profile, out, obj_max),
        "avg_cost": average_cost(profile, out),
        "opt_max": optimum(profile, mech.k, obj_max).cost,
        "opt_avg": optimum(profile, mech.k, AVERAGE_COST).cost,
    }
    summary["error_max"] = summary["max_cost"] - summary["opt_max"]
    summary["error_avg"] = summary["avg_cost"] - summary["opt_avg"]
    em = Emitter(args.output)
    em.records(rows, ("location", "probability"))
    em.records([summary])
    return EXIT_OK


def cmd_error(args) -> int:
    rep = additive_error(args.mech, args.profile, _objective(args))
    Emitter(args.output).records([rep.to_dict()])
    return EXIT_OK


def cmd_scan(args) -> int:
    obj = _objective(args)
    rep = worst_case_scan(args.mech, args.n, obj, args.grid, args.refine, workers=args.workers)
    bound = paper_bound(args.mech, obj)
    ok = bound is None or rep.error <= bound + VIOLATION_TOL
    Emitter(args.output).records([_report_row(rep, bound, "ok" if ok else "FAIL")])
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    found = truthfulness_check(args.mech, args.n, args.grid, args.coalition)
    em = Emitter(args.output)
    em.records([w.to_dict() for w in found])
    em.records([{"mechanism": args.mech.name, "n": args.n, "grid": args.grid, "violations": len(found)}])
    return EXIT_FAIL if found else EXIT_OK


def cmd_probe(args) -> int:
    mech = args.mech
    if mech.k == 1:
        rep, bound = deterministic_probe_single(mech), 1 / 4
    else:
        rep, bound = deterministic_probe_k(mech), 1 / (6 * mech.k)
    ok = rep.violation is None and rep.error >= bound - VIOLATION_TOL
    status = "ok" if ok else ("violation" if rep.violation is not None else "FAIL")
    Emitter(args.output).records([_report_row(rep, bound, status)])
    return EXIT_OK if ok else EXIT_FAIL


def cmd_certificate(args) -> int:
    if not args.randomized_lb:
        raise SystemExit("certificate: pass --randomized-lb")
    h = min(args.grid, 0.1)
    value = randomized_lb_certificate(h)
    ok = value >= 1 / 6 - VIOLATION_TOL
    Emitter(args.output).records([{"certificate": "randomized-lb", "grid": h, "value": value, "bound": 1 / 6, "status": "ok" if ok else "FAIL"}])
    return EXIT_OK if ok else EXIT_FAIL


def report_rows(grid: float, k: int | None, ext_grid: float) -> list[dict]:
    rows = []

    def row(spec: str, obj: Objective, n: int, g: float, bound: float) -> None:
        mech = MechanismSpec.parse(spec)
        rep = worst_case_scan(mech, n, obj, g)
        status = "ok" if rep.error <= bound + VIOLATION_TOL else "FAIL"
        rows.append(dict(zip(REPORT_COLUMNS, (mech.name, str(obj), n, mech.k, rep.error, bound, status))))

    for spec, bound in REPORT_SINGLE:
        row(spec, MAX_COST, 2, grid, bound)
    if k is not None and k >= 2:
        row(f"equal-spread:k={k}", MAX_COST, 2, ext_grid, 1 / (2 * k - 1))
        row(f"pec:k={k}", AVERAGE_COST, 2, ext_grid, 1 / (4 * k - 2))
        row(f"epec:k={k}", AVERAGE_COST, 3, ext_grid, 3 / (8 * k - 4))
        if k == 2:
            row("fifths", AVERAGE_COST, 5, ext_grid, 1 / 5)
    return rows


def cmd_report(args) -> int:
    rows = report_rows(args.grid, args.k, args.ext_grid)
    Emitter(args.output).records(rows, REPORT_COLUMNS)
    return EXIT_OK if all(r["status"] == "ok" for r in rows) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("json", "csv", "text"), default="text")
    common.add_argument("--objective", choices=("max", "avg"), default="max")
    common.add_argument(
        "--convention",
        choices=("expectation-of-max", "max-of-expectations"),
        default="expectation-of-max",
        help="how randomized placements are scored under max cost",
    )
    common.add_argument("--seed", type=int, default=0, help="reserved; all mechanisms are evaluated exactly")

    parser = _Parser(prog="facloc", description="Truthful facility location with additive errors.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_, *, mech=True, profile=False, n=False, grid=None):
        p = sub.add_parser(name, parents=[common], help=help_)
        if mech:
            p.add_argument("--mech", type=_mechanism, required=True, help="e.g. blrc, pec:k=3, dictator:i=1")
        if profile:
            p.add_argument("--profile", type=_profile, required=True, help="comma-separated reports in [0,1]")
        if n:
            p.add_argument("--n", type=int, default=2)
        if grid is not None:
            p.add_argument("--grid", type=_grid, default=grid)
        p.set_defaults(func=func)
        return p

    add("eval", cmd_eval, "evaluate a mechanism on one profile", profile=True)
    add("error", cmd_error, "additive error on one profile", profile=True)
    p = add("scan", cmd_scan, "worst-case additive error over a grid", n=True, grid=0.01)
    p.add_argument("--refine", type=int, default=0, help="coordinate refinement rounds")
    p.add_argument("--workers", type=int, default=1)
    p = add("verify", cmd_verify, "search for profitable misreports", n=True, grid=0.05)
    p.add_argument("--coalition", type=int, default=1, help="size of co-located deviating group")
    add("probe", cmd_probe, "run the deterministic lower-bound probe")
    p = add("certificate", cmd_certificate, "randomized lower-bound certificate", mech=False, grid=0.01)
    p.add_argument("--randomized-lb", action="store_true")
    p = add("report", cmd_report, "table of measured worst cases beside proven bounds", mech=False, grid=0.01)
    p.add_argument("--k", type=int, default=None, help="add multi-facility rows for this k")
    p.add_argument("--ext-grid", type=_grid, default=0.05, help="grid for multi-facility rows")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"facloc: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"facloc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
