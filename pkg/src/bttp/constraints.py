"""Feasibility checks for bipartite double round-robin schedules."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .model import Schedule, TeamItinerary, Venue

MAX_STREAK = 3

AT_MOST_THREE = "AT_MOST_THREE"
NO_REPEAT = "NO_REPEAT"
EACH_VENUE = "EACH_VENUE"
MATCHING = "MATCHING"
COMPLEMENTARITY = "COMPLEMENTARITY"
CROSS_LEAGUE = "CROSS_LEAGUE"


@dataclass(frozen=True)
class Violation:
    rule: str
    teams: tuple[int, ...]
    slots: tuple[int, ...]

    def __str__(self):
        return f"{self.rule} teams={list(self.teams)} slots={list(self.slots)}"


@dataclass
class ViolationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return not self.violations

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def add(self, rule, teams, slots):
        self.violations.append(Violation(rule, tuple(int(t) for t in teams), tuple(int(s) for s in slots)))

    def __bool__(self):
        return bool(self.violations)

    def __len__(self):
        return len(self.violations)

    def __str__(self):
        if not self.violations:
            return "feasible"
        return "\n".join(str(v) for v in self.violations)


def _long_runs(flags, limit=MAX_STREAK):
    """Yield (start, end) of maximal runs of equal values longer than ``limit``."""
    start = 0
    for s in range(1, len(flags) + 1):
        if s == len(flags) or flags[s] != flags[start]:
            if s - start > limit:
                yield start, s - 1
            start = s


def _row_checks(report, team, opps, homes, other_league):
    for a, b in _long_runs(list(homes)):
        report.add(AT_MOST_THREE, [team], range(a, b + 1))
    for s in range(len(opps) - 1):
        if opps[s] == opps[s + 1]:
            report.add(NO_REPEAT, [team, opps[s]], [s, s + 1])
    seen = Counter(zip(opps, homes))
    for u in other_league:
        for venue in (True, False):
            if seen[(u, venue)] != 1:
                slots = [s for s in range(len(opps)) if opps[s] == u and homes[s] == venue]
                report.add(EACH_VENUE, [team, u], slots)


def validate(sched: Schedule) -> ViolationReport:
    """Every violated rule, with the teams and slots involved."""
    n = sched.n
    m = 2 * n
    report = ViolationReport()
    opp, home = sched.opp, sched.home
    for t in range(m):
        for s in range(m):
            u = int(opp[t, s])
            if (t < n) == (u < n):
                report.add(CROSS_LEAGUE, [t, u], [s])
            elif opp[u, s] != t:
                report.add(MATCHING, [t, u], [s])
            elif home[u, s] == home[t, s] and t < u:
                report.add(COMPLEMENTARITY, [t, u], [s])
    for s in range(m):
        counts = Counter(int(u) for u in opp[:, s])
        for u, c in sorted(counts.items()):
            if c > 1:
                report.add(MATCHING, [u], [s])
    for t in range(m):
        others = range(n, m) if t < n else range(n)
        _row_checks(report, t, [int(u) for u in opp[t]], [bool(h) for h in home[t]], others)
    return report


def is_uniform(sched: Schedule) -> bool:
    """True when, in every slot, all league-X teams share one venue type."""
    x_home = sched.home[: sched.n]
    return bool(np.all(x_home == x_home[0]))


def itinerary_feasible(it: TeamItinerary) -> bool:
    """Row-level check: at-most-three, no-repeat and each-venue."""
    m = len(it)
    if m % 2:
        return False
    n = m // 2
    league_x = it.team < n
    others = range(n, m) if league_x else range(n)
    report = ViolationReport()
    _row_checks(report, it.team, list(it.opponents), [v is Venue.HOME for v in it.venues], others)
    return report.feasible
