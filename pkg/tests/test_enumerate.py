import itertools

import numpy as np
import pytest

from bttp import constraints, enumerate as enum_mod
from bttp.data import load_fixture
from bttp.model import CapacityError, Schedule, total_travel


def naive_feasible(n):
    """Every X-row grid and venue choice, filtered by the validator."""
    m = 2 * n
    perms = list(itertools.permutations(range(n)))
    out = set()
    for grid in itertools.product(perms, repeat=m):
        opp = np.array(grid).T + n
        for bits in itertools.product((False, True), repeat=n * m):
            home = np.array(bits).reshape(n, m)
            sched = Schedule.from_away_rows(n, opp, home)
            if constraints.validate(sched).feasible:
                out.add(sched.key())
    return out


def test_n2_enumeration_matches_validator():
    expected = naive_feasible(2)
    got = [s.key() for s in enum_mod.enumerate_all(2)]
    assert len(got) == len(set(got))
    assert set(got) == expected
    uniform = [s for s in enum_mod.enumerate_all(2, uniform_only=True)]
    assert all(constraints.is_uniform(s) for s in uniform)
    assert len(uniform) == sum(constraints.is_uniform(s) for s in enum_mod.enumerate_all(2))


def test_n3_table_is_consistent():
    table = enum_mod.schedule_table(3)
    inst = enum_mod.six_point_instance()
    totals = table.totals(inst.dist)
    rng = np.random.default_rng(0)
    for i in rng.choice(len(table), 40, replace=False):
        sched = table.schedule(int(i))
        assert constraints.validate(sched).feasible
        rep = total_travel(sched, inst)
        assert totals[i] == pytest.approx(rep.total_distance, abs=1e-9)
        assert table.trips[i] == rep.total_trips
        assert table.uniform[i] == constraints.is_uniform(sched)


def test_n3_schedules_distinct_and_closed_under_reversal():
    table = enum_mod.schedule_table(3)
    keys = {table.schedule(i).key() for i in range(0, len(table), 7)}
    assert len(keys) == len(range(0, len(table), 7))
    sample = [table.schedule(i) for i in range(0, len(table), 997)]
    all_keys = {table.schedule(i).key() for i in range(len(table))}
    assert all(s.reversed().key() in all_keys for s in sample)


def test_brute_optimum_on_fixtures():
    res = enum_mod.brute_optimum(load_fixture("two-point"))
    inst = load_fixture("two-point")
    for fid in ("table1-left", "table1-right"):
        assert total_travel(load_fixture(fid), inst).total_distance >= res.optimum
    six = enum_mod.brute_optimum(enum_mod.six_point_instance())
    keys = {s.key() for s in six.optima}
    assert {load_fixture("table2-a").key(), load_fixture("table2-b").key()} == keys


def test_pythagorean_validation_and_limits():
    with pytest.raises(ValueError):
        enum_mod.pythagorean_instance(1, 1, 1)
    with pytest.raises(CapacityError):
        next(enum_mod.enumerate_all(5))
