"""``pffb`` command-line front end.

Every subcommand prints JSON (or CSV for ``compare --format csv``) on
stdout.  Exit status: 0 on success, 1 on invalid input or an unsupported
pairing, 2 when the oracle refuses an instance as too large.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import adversary as adv
from .bounds import bound_objective, lower_bound_matrix, simple_lower_bound, sung_bound
from .engine import simulate
from .errors import PFFBError, SizeCapError
from .gantt import render_ascii, render_svg
from .model import (
    Instance,
    ObjectiveKind,
    Schedule,
    evaluate_objective,
    load_instance,
    require_feasible,
)
from .oracle import optimal_permutation_schedule, optimal_schedule_all_orders
from .qtime import as_fraction, format_fraction
from .strategies import STRATEGY_NAMES, make_strategy

OBJECTIVES = [k.value for k in ObjectiveKind]


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _objectives(sched: Schedule) -> dict:
    if sched.instance.n == 0:
        return {}
    return {k.value: evaluate_objective(sched, k).to_json() for k in ObjectiveKind}


def cmd_bound(args) -> int:
    inst = load_instance(args.instance)
    matrix = lower_bound_matrix(inst)
    out = {"matrix": matrix.to_json()}
    if inst.n:
        out["c_star_sn"] = matrix.last_row[-1].to_json()
    if args.sung:
        out["sung"] = sung_bound(inst).to_json()
    if args.simple:
        i, j = args.simple
        out["simple"] = {"stage": i, "job": j, "value": simple_lower_bound(inst, i, j).to_json()}
    _emit(out)
    return 0


def cmd_run(args) -> int:
    inst = load_instance(args.instance)
    strategy = make_strategy(args.strategy, inst.stages)
    trace = simulate(inst, strategy)
    sched = trace.schedule
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(json.dumps(sched.to_json(), indent=2) + "\n")
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write(json.dumps(trace.to_json(), indent=2) + "\n")
    _emit({"strategy": args.strategy, "schedule": sched.to_json(),
           "objectives": _objectives(sched)})
    return 0


def cmd_oracle(args) -> int:
    inst = load_instance(args.instance)
    kind = ObjectiveKind.parse(args.objective)
    sched, value = optimal_permutation_schedule(inst, kind, cap=args.cap)
    out = {"objective": kind.value, "value": value.to_json(), "schedule": sched.to_json()}
    if args.all_orders:
        out["all_orders_value"] = optimal_schedule_all_orders(inst, kind).to_json()
    _emit(out)
    return 0


def cmd_adversary(args) -> int:
    family = args.family
    if family in ("sumcj", "sumfj"):
        b1 = args.b1 or 10
        eps = as_fraction(args.eps) if args.eps else None
        script = (adv.adversary_sum_cj if family == "sumcj" else adv.adversary_sum_fj)(b1, eps)
        strategy = make_strategy(args.strategy, script.stages)
        result = adv.play(script, strategy)
        _emit({"family": family, "strategy": args.strategy, "b1": b1,
               "eps": format_fraction(script.eps), **result.to_json()})
        return 0
    if family == "nw-tight":
        inst, reference = adv.never_wait_tightness_instance(as_fraction(args.alpha or "1/2"),
                                                            args.m1 or 1)
    else:
        inst, reference = adv.full_batch_family(int(as_fraction(args.alpha or 1)))
    strategy = make_strategy(args.strategy, inst.stages)
    trace = simulate(inst, strategy)
    rows = {}
    for kind in ObjectiveKind:
        value = evaluate_objective(trace.schedule, kind)
        ref = evaluate_objective(reference, kind)
        row = {"value": value.to_json(), "reference": ref.to_json(),
               "ratio_vs_reference": (value / ref).to_json()}
        try:
            _, opt = optimal_permutation_schedule(inst, kind, cap=args.cap)
            row["optimum"] = opt.to_json()
            row["ratio_vs_optimum"] = (value / opt).to_json()
        except SizeCapError:
            row["optimum"] = None
        rows[kind.value] = row
    _emit({"family": family, "strategy": args.strategy, "instance": inst.to_json(),
           "reference_schedule": reference.to_json(), "schedule": trace.schedule.to_json(),
           "objectives": rows})
    return 0


CSV_COLUMNS = ["strategy", "objective", "value_a", "value_b", "ratio_num", "ratio_den",
               "ratio_sqrt5_num", "ratio_sqrt5_den", "bound_ratio_num", "bound_ratio_den",
               "bound_ratio_sqrt5_num", "bound_ratio_sqrt5_den"]


def compare_rows(inst: Instance, strategies, kind: ObjectiveKind, bound_only=False, cap=None):
    """One row per strategy: value, ratio vs optimum, ratio vs bound floor."""
    floor = bound_objective(inst, kind)
    opt = None
    if not bound_only:
        _, opt = optimal_permutation_schedule(inst, kind, cap=cap)
    rows = []
    for name in strategies:
        sched = simulate(inst, make_strategy(name, inst.stages)).schedule
        value = evaluate_objective(sched, kind)
        rows.append({
            "strategy": name,
            "objective": kind.value,
            "value": value,
            "ratio": None if opt is None else value / opt,
            "bound_ratio": value / floor,
        })
    return rows


def _split(x) -> list[str]:
    if x is None:
        return ["", "", "", ""]
    return [str(x.a.numerator), str(x.a.denominator), str(x.b.numerator), str(x.b.denominator)]


def cmd_compare(args) -> int:
    inst = load_instance(args.instance)
    kind = ObjectiveKind.parse(args.objective)
    rows = compare_rows(inst, args.strategies, kind, args.bound_only, args.cap)
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            v = row["value"]
            writer.writerow([row["strategy"], row["objective"],
                             format_fraction(v.a), format_fraction(v.b),
                             *_split(row["ratio"]), *_split(row["bound_ratio"])])
        sys.stdout.write(buf.getvalue())
    else:
        _emit([{"strategy": r["strategy"], "objective": r["objective"],
                "value": r["value"].to_json(),
                "ratio": None if r["ratio"] is None else r["ratio"].to_json(),
                "bound_ratio": r["bound_ratio"].to_json()} for r in rows])
    return 0


def cmd_gantt(args) -> int:
    with open(args.schedule) as fh:
        obj = json.load(fh)
    if args.instance:
        inst = load_instance(args.instance)
    elif "instance" in obj:
        inst = Instance.from_json(obj["instance"])
    else:
        raise PFFBError("schedule file has no instance; pass --instance")
    sched = require_feasible(Schedule.from_json(obj.get("schedule", obj), inst))
    text = render_svg(sched) if args.format == "svg" else render_ascii(sched)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pffb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="lower-bound matrix and scalar bounds")
    p.add_argument("instance")
    p.add_argument("--sung", action="store_true")
    p.add_argument("--simple", nargs=2, type=int, metavar=("I", "J"))
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("run", help="simulate a strategy on an instance")
    p.add_argument("instance")
    p.add_argument("--strategy", required=True, choices=STRATEGY_NAMES)
    p.add_argument("-o", "--output")
    p.add_argument("--trace")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("oracle", help="exact offline optimum by enumeration")
    p.add_argument("instance")
    p.add_argument("--objective", required=True, choices=OBJECTIVES)
    p.add_argument("--all-orders", action="store_true")
    p.add_argument("--cap", type=int)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("adversary", help="play an adversary or build a worst-case family")
    p.add_argument("--family", required=True, choices=adv.FAMILY_NAMES)
    p.add_argument("--strategy", required=True, choices=STRATEGY_NAMES)
    p.add_argument("--eps")
    p.add_argument("--b1", type=int)
    p.add_argument("--alpha")
    p.add_argument("--m1", type=int)
    p.add_argument("--cap", type=int)
    p.set_defaults(func=cmd_adversary)

    p = sub.add_parser("compare", help="compare strategies against the optimum")
    p.add_argument("instance")
    p.add_argument("--strategies", nargs="+", default=["never-wait", "full-batch"],
                   choices=STRATEGY_NAMES)
    p.add_argument("--objective", default="cmax", choices=OBJECTIVES)
    p.add_argument("--format", default="json", choices=["json", "csv"])
    p.add_argument("--bound-only", action="store_true")
    p.add_argument("--cap", type=int)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gantt", help="render a schedule as a job-oriented Gantt chart")
    p.add_argument("schedule")
    p.add_argument("--instance")
    p.add_argument("--format", default="ascii", choices=["ascii", "svg"])
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gantt)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SizeCapError as exc:
        print(f"pffb: {exc}", file=sys.stderr)
        return 2
    except (PFFBError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"pffb: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
