import numpy as np
import pytest

from bttp import bounds, constraints, enumerate as enum_mod, solver
from bttp.data import load_fixture
from bttp.model import Instance, TeamItinerary, Venue, total_travel


def random_n3(seed):
    rng = np.random.default_rng(seed)
    pts = rng.integers(0, 20, size=(6, 2))
    d = np.rint(np.hypot(*(pts[:, None] - pts[None]).transpose(2, 0, 1))).astype(np.int64)
    return Instance(3, tuple(f"t{i}" for i in range(6)), d)


def keys(schedules):
    return sorted(s.key() for s in schedules)


def test_patterns():
    pats = solver.away_patterns(6)
    assert len(pats) == 616
    assert sum(solver.in_blocks_of_three(p, 12) for p in pats) == 9
    assert solver.pattern_text(0b111000111000, 12) == "HHH-RRR-HHH-RRR"


def test_space_excess_matches_travel():
    inst = load_fixture("npb")
    sp = solver.full_space(6, inst, 120)
    ilb = bounds.ilb(6, inst)[0]
    rng = np.random.default_rng(0)
    perms = solver._perms(6)
    for i in rng.choice(len(sp), 25, replace=False):
        mask = sp.mask(i)
        order = iter(perms[sp.order[i]])
        cells = []
        hosts = iter(range(6))
        for s in range(12):
            if mask >> s & 1:
                cells.append((int(next(order)), Venue.AWAY))
            else:
                cells.append((next(hosts), Venue.HOME))
        it = TeamItinerary.from_cells(6, cells)
        assert bounds.itinerary_excess(it, inst, ilb) == sp.excess[i]
        away = [s for s in range(12) if mask >> s & 1]
        assert sorted(sp.visit[i].tolist()) == away
    assert sp.excess.max() <= 120 and sp.bound == 0


@pytest.mark.parametrize("seed", range(6))
def test_matches_brute_force_n3(seed):
    inst = random_n3(seed)
    brute = enum_mod.brute_optimum(inst)
    res = solver.solve_exact(inst)
    assert res.optimum == brute.optimum
    assert keys(res.schedules) == keys(brute.optima)
    plain = solver.solve_exact(inst, prune=False)
    assert keys(plain.schedules) == keys(res.schedules)


def test_geometric_n3_instances():
    for inst in (enum_mod.six_point_instance(), enum_mod.pythagorean_instance(3, 4, 5)):
        brute = enum_mod.brute_optimum(inst)
        res = solver.solve_exact(inst)
        assert res.optimum == pytest.approx(brute.optimum, abs=1e-9)
        assert keys(res.schedules) == keys(brute.optima)


def test_budget_search_lists_everything_within_budget():
    inst = random_n3(3)
    table = enum_mod.schedule_table(3)
    ilb_total = sum(bounds.all_ilb(inst))
    totals = np.rint(table.totals(inst.dist)).astype(int) - ilb_total
    budget = int(np.sort(totals)[40])
    found, stats = solver.search(inst, budget)
    expected = sorted(table.schedule(int(i)).key() for i in np.flatnonzero(totals <= budget))
    assert sorted(s.key() for _, s in found) == expected
    for value, s in found:
        assert total_travel(s, inst).total_distance - ilb_total == value
    assert stats.found == len(found)


def test_results_are_feasible_and_closed_under_reversal():
    inst = random_n3(1)
    res = solver.solve_exact(inst)
    ks = set(keys(res.schedules))
    for s in res.schedules:
        assert constraints.validate(s).feasible
        assert s.reversed().key() in ks
    assert 2 * len(res.canonical) >= len(res.schedules)


def test_prop1_filter_by_hand():
    sp = solver.full_space(6, load_fixture("npb"), 60)
    spaces = {6: sp, 7: sp.take(np.flatnonzero(sp.excess >= 10))}
    res = solver.prop1_filter(spaces, 40)
    assert res.bounds[6] == 0 and res.bounds[7] == sp.excess[sp.excess >= 10].min()
    assert res.total_bound == res.bounds[6] + res.bounds[7]
    assert res.thresholds[6] == 40 - res.bounds[7]
    assert res.spaces[6].excess.max() <= res.thresholds[6]


def test_global_constraint_restricts_space():
    inst = load_fixture("npb")
    sched = load_fixture("table8")
    gamma = solver.GlobalConstraint.from_home_sets(sched, [0])
    assert len(gamma) == 6
    c1 = inst.index("c1")
    sp = solver.build_space(c1, inst, gamma, 187)
    slot = next(s for s in range(12) if sched.opp[0, s] == c1 and sched.home[0, s])
    assert np.all(sp.visit[:, 0] == slot)
    own = sched.itinerary(c1)
    assert len(sp) > 0 and sp.bound <= bounds.itinerary_excess(own, inst)


def test_deepening_budgets_ascend_to_cap():
    b = solver.deepening_budgets(42763, 1000)
    assert b[0] == 0 and b[-1] == 1000
    assert all(x < y for x, y in zip(b, b[1:]))


def test_capacity():
    d = np.zeros((14, 14), dtype=int)
    with pytest.raises(solver.CapacityError):
        solver.solve_exact(Instance(7, tuple(f"t{i}" for i in range(14)), d))
