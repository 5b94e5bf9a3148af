"""Walk through the pruning steps of the exact solver on the baseball instance.

Pass ``--solve`` to also run the full exact search (slow).
"""

import sys

from bttp import data, solver

BUDGET = 187


def main():
    inst = data.load_fixture("npb")
    spaces = {t: solver.full_space(t, inst, BUDGET) for t in range(inst.size)}
    screen = solver.prop2_screen(inst, BUDGET, far_pair=(4, 5), spaces=spaces)
    names = {inst.team_names[t]: b for t, b in screen.exceptions.items()}
    print("teams that may split the far pair, with their least excess:", names)

    sched = data.load_fixture("table8")
    fixed = [inst.index(t) for t in ("p1", "p3", "p5", "p6")]
    gamma = solver.GlobalConstraint.from_home_sets(sched, fixed)
    central = {t: solver.build_space(t, inst, gamma, BUDGET) for t in inst.league_teams("Y")}
    res = solver.prop1_filter(central, BUDGET)
    for t in inst.league_teams("Y"):
        print(f"{inst.team_names[t]}: {len(central[t]):5d} consistent, bound {res.bounds[t]:4d}, kept {len(res.spaces[t])}")

    if "--solve" in sys.argv:
        out = solver.solve_exact(inst, progress=lambda msg: print("  ", msg, flush=True))
        print(f"optimum {out.optimum}, excess {out.excess}, {out.count} optima, {len(out.canonical)} up to reversal")


if __name__ == "__main__":
    main()
