"""Exhaustive results for three-team leagues and a short trip-count simulation."""

from bttp import enumerate as enum_mod, sim


def main():
    table = enum_mod.schedule_table(3)
    print(f"feasible schedules {len(table)}, uniform {int(table.uniform.sum())}")
    six = enum_mod.brute_optimum(enum_mod.six_point_instance())
    print(f"six-point optimum {six.optimum:.6f} with trips {six.trips}")
    inst = enum_mod.pythagorean_instance(3, 4, 5)
    print(f"(3,4,5) optimum {enum_mod.brute_optimum(inst).optimum}, uniform {enum_mod.brute_optimum(inst, uniform_only=True).optimum}")
    hist = sim.run_simulation(500, seed=1)
    print("trip counts of random optima:", hist.counts)


if __name__ == "__main__":
    main()
