import numpy as np
import pytest

from bttp import constraints
from bttp.data import load_fixture
from bttp.formats import FormatError, instance_from_text, instance_to_text, schedule_from_text, schedule_to_text
from bttp.model import Schedule


def test_instance_round_trip():
    for fid in ("npb", "six-point"):
        inst = load_fixture(fid)
        back = instance_from_text(instance_to_text(inst))
        assert back.team_names == inst.team_names
        assert np.array_equal(back.dist, inst.dist)
        assert back.is_integral == inst.is_integral


def test_instance_format_errors():
    with pytest.raises(FormatError):
        instance_from_text("not json")
    with pytest.raises(FormatError):
        instance_from_text('{"n": 2}')


def test_schedule_round_trip_and_half_rows():
    inst = load_fixture("npb")
    sched = load_fixture("table8")
    text = schedule_to_text(sched, inst, header="round trip")
    assert schedule_from_text(text, inst) == sched
    half = "\n".join(text.splitlines()[1:7])  # league X rows only
    assert schedule_from_text(half, inst) == sched


def test_schedule_format_errors():
    inst = load_fixture("npb")
    with pytest.raises(FormatError):
        schedule_from_text("p1 c1 c2", inst)
    with pytest.raises(FormatError):
        schedule_from_text("zz: " + " ".join(["c1"] * 12), inst)
    with pytest.raises(FormatError):
        schedule_from_text("p1: c1 c2", inst)


def test_fixtures_are_feasible():
    for fid in ("table1-left", "table1-right", "table2-a", "table2-b", "table7", "table8", "table9"):
        assert constraints.validate(load_fixture(fid)).feasible, fid


def _mutate(sched, fn):
    opp, home = sched.opp.copy(), sched.home.copy()
    fn(opp, home)
    return Schedule(sched.n, opp, home)


def test_each_rule_is_detected():
    sched = load_fixture("table8")
    # flip one venue on both sides: streak lengths and venue counts break
    def flip(opp, home):
        u = opp[0, 0]
        home[0, 0] = not home[0, 0]
        home[u, 0] = not home[u, 0]
    rules = constraints.validate(_mutate(sched, flip)).rules()
    assert constraints.EACH_VENUE in rules

    def one_side(opp, home):
        home[0, 0] = not home[0, 0]
    assert constraints.COMPLEMENTARITY in constraints.validate(_mutate(sched, one_side)).rules()

    def same_league(opp, home):
        opp[0, 0] = 1
    rules = constraints.validate(_mutate(sched, same_league)).rules()
    assert constraints.CROSS_LEAGUE in rules

    def swap_slots(opp, home):
        opp[:, [0, 1]] = opp[:, [1, 0]]
        home[:, [0, 1]] = home[:, [1, 0]]
    # a whole-column swap keeps every pairing; only row rules can break
    assert constraints.MATCHING not in constraints.validate(_mutate(sched, swap_slots)).rules()


def test_no_repeat_and_streak_by_hand():
    # n = 2: a plays c, c in consecutive slots
    opp = np.array([[2, 2, 3, 3], [3, 3, 2, 2], [0, 0, 1, 1], [1, 1, 0, 0]])
    home = np.array([[True, False, True, False], [True, False, True, False],
                     [False, True, False, True], [False, True, False, True]])
    rep = constraints.validate(Schedule(2, opp, home))
    assert constraints.NO_REPEAT in rep.rules()
    assert not rep.feasible
    # row with four straight away games
    row = [(4 + k, "A") for k in range(4)] + [(4 + k, "H") for k in range(4)]
    from bttp.model import TeamItinerary
    assert not constraints.itinerary_feasible(TeamItinerary.from_cells(0, row))
    ok = [(4, "A"), (5, "A"), (6, "A"), (7, "H"), (4, "H"), (5, "H"), (7, "A"), (6, "H")]
    assert constraints.itinerary_feasible(TeamItinerary.from_cells(0, ok))


def test_uniformity_flags():
    assert constraints.is_uniform(load_fixture("table9"))
    assert constraints.is_uniform(load_fixture("table1-left"))
    assert not constraints.is_uniform(load_fixture("table8"))
