"""Build a uniform NBA schedule and compare it with the naive baseline."""

from bttp import bounds, constraints, data, uniform
from bttp.model import total_travel


def main():
    inst = data.load_fixture("nba")
    summary = bounds.bound_summary(inst)
    plan, sched = uniform.construct(inst)
    base = uniform.baseline_plan(inst)
    print(f"trivial lower bound      {summary.tlb_trivial}")
    print(f"constructed total        {plan.total}  (West {plan.x_travel}, East {plan.y_travel})")
    print(f"index-triple baseline    {base.total}")
    print(f"schedule feasible        {constraints.validate(sched).feasible}")
    print(f"schedule uniform         {constraints.is_uniform(sched)}")
    print(f"recomputed total         {total_travel(sched, inst).total_distance}")


if __name__ == "__main__":
    main()
