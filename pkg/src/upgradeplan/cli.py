"""Command-line front end.

Usage::

    upgradeplan solve      --instance FILE [--csv OUT]
    upgradeplan solve-base --instance FILE [--csv OUT]
    upgradeplan oracle     --instance FILE --step DELTA [--csv OUT]
    upgradeplan sweep      --instance FILE --param {cd,c0,m} --from A --to B [--points K] [--csv OUT]
    upgradeplan classify   --instance FILE

Errors print one line ``error[CODE]: message`` on stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

from .base_solver import solve_base
from .costfn import classify_shape
from .errors import UpgradePlanError
from .instance_file import load_instance
from .oracle import GridSpec, oracle_solve
from .overhaul_dp import solve
from .sensitivity import sweep_c0, sweep_cd, sweep_overhaul_count

COMMANDS = ("solve", "solve-base", "oracle", "sweep", "classify")
SOLVE_COLUMNS = ["cost", "N", "S", "upgrade_times"]
SWEEP_COLUMNS = ["param_value", "cost", "N", "S", "upgrade_times"]


class UsageError(UpgradePlanError):
    code = "E_USAGE"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="upgradeplan", description="Cost-minimal upgrade schedules over a fixed lifetime.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--instance", required=True, help="JSON instance file")
    p.add_argument("--csv", help="write machine-readable results here")
    p.add_argument("--param", choices=("cd", "c0", "m"), help="swept parameter")
    p.add_argument("--from", dest="lo", type=float, help="sweep start")
    p.add_argument("--to", dest="hi", type=float, help="sweep end")
    p.add_argument("--points", type=int, help="number of sweep samples (cd, c0)")
    p.add_argument("--step", type=float, help="oracle grid step")
    return p


def _fmt(x):
    return f"{x:.6g}"


def _times_text(times):
    return ", ".join(_fmt(t) for t in times) if times else "(none)"


def _csv_times(times):
    return ";".join(repr(float(t)) for t in times)


def _check_options(command, opts):
    sweep_only = {"--param": opts.param, "--from": opts.lo, "--to": opts.hi, "--points": opts.points}
    if command == "sweep":
        missing = [k for k in ("--param", "--from", "--to") if sweep_only[k] is None]
        if opts.param in ("cd", "c0") and opts.points is None:
            missing.append("--points")
        if missing:
            raise UsageError(f"sweep requires {', '.join(missing)}")
    else:
        given = [k for k, v in sweep_only.items() if v is not None]
        if given:
            raise UsageError(f"{', '.join(given)} only apply to sweep")
    if command == "oracle":
        if opts.step is None:
            raise UsageError("oracle requires --step")
    elif opts.step is not None:
        raise UsageError("--step only applies to oracle")
    if command == "classify" and opts.csv:
        raise UsageError("classify has no CSV output")


def _solution_report(title, result):
    lines = [
        title,
        f"  cost            {_fmt(result.total_cost)}",
        f"  upgrades N      {result.n_upgrades}",
        f"  off-overhaul S  {result.off_overhaul}",
        f"  upgrade times   {_times_text(result.times)}",
    ]
    if result.heuristic:
        lines.append("  note            general-shape numeric search; optimality not certified")
    rows = [[repr(result.total_cost), result.n_upgrades, result.off_overhaul, _csv_times(result.times)]]
    return "\n".join(lines), SOLVE_COLUMNS, rows


def _sweep_report(instance, opts):
    if opts.param == "cd":
        res = sweep_cd(instance, (opts.lo, opts.hi), opts.points)
    elif opts.param == "c0":
        res = sweep_c0(instance, (opts.lo, opts.hi), opts.points)
    else:
        lo, hi = int(round(opts.lo)), int(round(opts.hi))
        res = sweep_overhaul_count(instance, range(lo, hi + 1))
    head = f"{opts.param:>10}  {'cost':>10}  {'N':>3}  {'S':>3}  upgrade times"
    lines = [f"sweep over {opts.param}", head]
    rows = []
    for value, r in res.samples:
        lines.append(
            f"{_fmt(value):>10}  {_fmt(r.total_cost):>10}  {r.n_upgrades:>3}  {r.off_overhaul:>3}  {_times_text(r.times)}"
        )
        value_text = str(int(value)) if opts.param == "m" else repr(value)
        rows.append([value_text, repr(r.total_cost), r.n_upgrades, r.off_overhaul, _csv_times(r.times)])
    label = "policy changes near" if opts.param == "m" else "breakpoints"
    lines.append(f"{label}: {', '.join(_fmt(b) for b in res.breakpoints) or '(none)'}")
    return "\n".join(lines), SWEEP_COLUMNS, rows


def run(command, instance, options):
    """Execute one command.

    Returns ``(report_text, csv_columns, csv_rows)``; the CSV parts are
    ``None`` for commands without machine output.
    """
    if command not in COMMANDS:
        raise UsageError(f"unknown command {command!r}")
    _check_options(command, options)
    if command == "solve":
        return _solution_report("optimal policy", solve(instance))
    if command == "solve-base":
        return _solution_report("optimal policy, no off-overhaul penalty", solve_base(instance))
    if command == "oracle":
        return _solution_report(f"grid optimum, step {_fmt(options.step)}", oracle_solve(instance, GridSpec(options.step)))
    if command == "sweep":
        return _sweep_report(instance, options)
    return str(classify_shape(instance.model, instance.horizon)), None, None


def render_csv(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def main(argv=None):
    try:
        opts = build_parser().parse_args(argv)
        instance = load_instance(opts.instance)
        report, columns, rows = run(opts.command, instance, opts)
        if opts.csv:
            with open(opts.csv, "w", encoding="utf-8", newline="") as fh:
                fh.write(render_csv(columns, rows))
    except UpgradePlanError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, UsageError) else 1
    except OSError as exc:
        print(f"error[E_IO]: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error[E_VALUE]: {exc}", file=sys.stderr)
        return 1
    print(report)
    return 0


if __name__ == "__main__":
    sys.exit(main())
