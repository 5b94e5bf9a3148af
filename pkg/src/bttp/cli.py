"""Command-line entry point: ``bttp <subcommand> ...``.

Exit codes: 0 success, 2 infeasible schedule (or no schedule within the
requested budget), 3 capacity exceeded, 4 I/O or parse error.  An
unsatisfiable formula is a normal result and exits 0.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bounds, constraints, data, enumerate as enum_mod, formats, satred, sim, solver, uniform
from .model import CapacityError, Instance, total_travel

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_CAPACITY = 3
EXIT_IO = 4


class InputError(Exception):
    pass


# ------------------------------------------------------------ loading


def load_instance(ref: str) -> Instance:
    """A fixture id or a path to an instance JSON file."""
    if ref in data.FIXTURES and data.FIXTURES[ref].kind == "instance":
        return data.load_fixture(ref)
    path = Path(ref)
    if not path.exists():
        raise InputError(f"no instance fixture or file named {ref!r}")
    return formats.read_instance(path)


def load_schedule(ref: str, inst_ref: str | None):
    """A schedule fixture id or file; returns (schedule, instance)."""
    if ref in data.FIXTURES and data.FIXTURES[ref].kind == "schedule":
        inst = load_instance(inst_ref) if inst_ref else data.paired_instance(ref)
        return formats.schedule_from_text(data.fixture_text(ref), inst), inst
    if inst_ref is None:
        raise InputError("a schedule file needs --instance")
    inst = load_instance(inst_ref)
    path = Path(ref)
    if not path.exists():
        raise InputError(f"no schedule fixture or file named {ref!r}")
    return formats.read_schedule(path, inst), inst


def load_cnf(ref: str) -> satred.CnfFormula:
    info = None
    try:
        info = data.fixture_info(ref)
    except data.FixtureError:
        pass
    if info is not None and info.kind == "cnf":
        return satred.parse_dimacs(data.fixture_text(info.id))
    path = Path(ref)
    if not path.exists():
        raise InputError(f"no CNF fixture or file named {ref!r}")
    return satred.read_dimacs(path)


def _num(v):
    if v is None:
        return None
    f = float(v)
    return int(f) if f.is_integer() else round(f, 9)


def _emit(args, payload: dict, text: str):
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _write_schedule(args, sched, inst, header=None):
    if args.output:
        formats.write_schedule(args.output, sched, inst, header)


# ------------------------------------------------------------ commands


def cmd_validate(args) -> int:
    sched, inst = load_schedule(args.schedule, args.instance)
    report = constraints.validate(sched)
    travel = total_travel(sched, inst)
    payload = {
        "feasible": report.feasible,
        "uniform": constraints.is_uniform(sched),
        "total": _num(travel.total_distance),
        "trips": travel.total_trips,
        "violations": [str(v) for v in report.violations],
    }
    text = f"{report}\nuniform: {payload['uniform']}\ntrips: {travel.total_trips}\ntotal {payload['total']}"
    _emit(args, payload, text)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_bounds(args) -> int:
    inst = load_instance(args.instance)
    summary = bounds.bound_summary(inst)
    payload = {
        "ilb": {inst.team_names[t]: _num(v) for t, v in enumerate(summary.ilb)},
        "league_x": _num(summary.llb_x),
        "league_y": _num(summary.llb_y),
        "total": _num(summary.tlb_trivial),
    }
    lines = [f"{inst.team_names[t]:>6} {_num(v)}" for t, v in enumerate(summary.ilb)]
    lines.append(f"{_num(summary.llb_x)} / {_num(summary.llb_y)} / {_num(summary.tlb_trivial)}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_brute(args) -> int:
    inst = load_instance(args.instance)
    res = enum_mod.brute_optimum(inst, uniform_only=args.uniform)
    payload = {
        "optimum": _num(res.optimum),
        "optima": len(res.optima),
        "trips": list(res.trips),
        "tie": res.tie,
        "feasible_count": res.feasible_count,
        "uniform_count": res.uniform_count,
    }
    text = f"optimum {payload['optimum']}\noptima {len(res.optima)} trips {sorted(set(res.trips))}"
    _emit(args, payload, text)
    if res.optima:
        _write_schedule(args, res.optima[0], inst, f"optimum {payload['optimum']}")
    return EXIT_OK


def cmd_enumerate(args) -> int:
    if args.n > 3:
        raise CapacityError("counting is limited to n <= 3")
    table = enum_mod.schedule_table(args.n)
    payload = {"n": args.n, "feasible": len(table), "uniform": int(table.uniform.sum())}
    _emit(args, payload, f"feasible {payload['feasible']}\nuniform {payload['uniform']}")
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    prog = (lambda s: print(s, file=sys.stderr, flush=True)) if args.verbose else None
    res = solver.solve_exact(inst, bound=args.bound, prune=not args.no_prune, progress=prog)
    if res.optimum is None:
        payload = {"optimum": None, "budget": _num(res.budget)}
        _emit(args, payload, f"no schedule within excess {_num(res.budget)}")
        return EXIT_INFEASIBLE
    payload = {
        "optimum": _num(res.optimum),
        "excess": _num(res.excess),
        "ilb_total": _num(res.ilb_total),
        "optima": res.count,
        "optima_up_to_reversal": len(res.canonical),
        "budget": _num(res.budget),
    }
    text = (f"optimum {payload['optimum']} (excess {payload['excess']})\n"
            f"optima {res.count}, up to reversal {len(res.canonical)}")
    _emit(args, payload, text)
    if args.output:
        chosen = res.schedules if args.all_optima else res.canonical[:1]
        out = []
        for i, s in enumerate(chosen):
            out.append(formats.schedule_to_text(s, inst, f"optimum {i + 1} of {len(chosen)}, total {payload['optimum']}"))
        Path(args.output).write_text("\n".join(out))
    return EXIT_OK


def cmd_construct(args) -> int:
    inst = load_instance(args.instance)
    plan, sched = uniform.construct(inst)
    base = uniform.baseline_plan(inst)
    payload = {
        "x_away": _num(plan.x_travel),
        "y_away": _num(plan.y_travel),
        "total": _num(plan.total),
        "baseline": _num(base.total),
        "schedule_total": _num(total_travel(sched, inst).total_distance),
    }
    text = (f"league X away travel {payload['x_away']}\nleague Y away travel {payload['y_away']}\n"
            f"total {payload['total']} (baseline {payload['baseline']})")
    _emit(args, payload, text)
    _write_schedule(args, sched, inst, f"uniform construction, total {payload['schedule_total']}")
    return EXIT_OK


def cmd_reduce(args) -> int:
    formula = load_cnf(args.cnf)
    bal = formula if formula.balanced else satred.balance(formula)
    red = satred.build_reduction(bal)
    payload = {
        "k": red.k,
        "z": red.z,
        "teams": red.instance.size,
        "target": red.target,
        "root_bounds": {r: satred.root_ilb(r, red.k) for r in satred.ROOTS},
        "triangle_violations": satred.triangle_violations(red.instance.dist),
    }
    text = (f"k={red.k} z={red.z} teams={red.instance.size}\ntarget {red.target}\n"
            + "\n".join(f"{r}-rooted bound {v}" for r, v in payload["root_bounds"].items()))
    _emit(args, payload, text)
    if args.output:
        formats.write_instance(args.output, red.instance)
    return EXIT_OK


def cmd_decide(args) -> int:
    formula = load_cnf(args.cnf)
    dec = satred.decide_sat_via_bttp(formula)
    payload = {"satisfiable": dec.satisfiable, "assignment": list(dec.assignment) if dec.assignment else None}
    text = "SAT" if dec.satisfiable else "UNSAT"
    if dec.assignment:
        text += "\n" + " ".join(f"{i + 1}={'T' if v else 'F'}" for i, v in enumerate(dec.assignment))
    _emit(args, payload, text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    hist = sim.run_simulation(args.trials, args.seed, args.region, args.jobs)
    if args.json:
        print(hist.to_json(), end="")
    else:
        print(hist.table())
    if args.output:
        Path(args.output).write_text(hist.to_json())
    return EXIT_OK


def cmd_fixtures(args) -> int:
    if args.action == "list":
        for fid in data.fixture_ids():
            info = data.FIXTURES[fid]
            pair = f" (with {info.instance})" if info.instance else ""
            print(f"{fid:<14} {info.kind:<9} {info.note}{pair}")
        return EXIT_OK
    if not args.id:
        raise InputError("fixtures dump needs an id")
    print(data.fixture_text(args.id), end="")
    return EXIT_OK


# ------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bttp", description="Bipartite travelling tournament toolkit")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("-v", "--verbose", action="store_true", help="progress on standard error")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check a schedule and report its travel")
    s.add_argument("schedule", help="schedule fixture id or file")
    s.add_argument("--instance", help="instance fixture id or file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("bounds", help="individual and league lower bounds")
    s.add_argument("instance")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("brute", help="exhaustive optimum for n = 3")
    s.add_argument("instance")
    s.add_argument("--uniform", action="store_true", help="uniform schedules only")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_brute)

    s = sub.add_parser("enumerate", help="count feasible and uniform schedules")
    s.add_argument("--n", type=int, default=3)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("solve", help="exact optimum for n <= 6")
    s.add_argument("instance")
    s.add_argument("--bound", type=float, help="excess budget M (default: iterative deepening)")
    s.add_argument("--all-optima", action="store_true", help="write every optimum, reversals included")
    s.add_argument("--no-prune", action="store_true", help="disable the bound filters")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("construct", help="uniform construction")
    s.add_argument("instance")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("reduce", help="build the tournament instance for a CNF formula")
    s.add_argument("cnf")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("decide", help="decide a CNF formula through its tournament instance")
    s.add_argument("cnf")
    s.set_defaults(func=cmd_decide)

    s = sub.add_parser("simulate", help="trip-count histogram of random n = 3 optima")
    s.add_argument("--trials", type=int, default=10000)
    s.add_argument("--seed", type=int, default=2026)
    s.add_argument("--region", default="unit-square")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("fixtures", help="list or print bundled fixtures")
    s.add_argument("action", choices=["list", "dump"])
    s.add_argument("id", nargs="?")
    s.set_defaults(func=cmd_fixtures)
    return p


def dispatch(args) -> int:
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (InputError, OSError, formats.FormatError, satred.CnfError, data.FixtureError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate" and args.trials < 1:
        parser.error("--trials must be positive")
    if hasattr(args, "jobs") and args.jobs < 1:
        parser.error("--jobs must be positive")
    return dispatch(args)


if __name__ == "__main__":
    sys.exit(main())
