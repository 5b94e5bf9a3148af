"""Individual, league and trivial tournament lower bounds.

A team's individual lower bound (ILB) is the cheapest way to split its away
opponents into road trips of at most three games.  It is computed exactly by
dynamic programming over subsets of opponents.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from numba import njit

from .model import DIST_TOL, CapacityError, Instance, TeamItinerary, team_travel_distance

MAX_DP_OPPONENTS = 24


@dataclass(frozen=True)
class TripPlan:
    team: int
    trips: tuple[tuple[int, ...], ...]
    cost: object

    @property
    def trip_sizes(self) -> tuple[int, ...]:
        return tuple(len(t) for t in self.trips)


@dataclass(frozen=True)
class BoundSummary:
    ilb: tuple
    llb_x: object
    llb_y: object

    @property
    def tlb_trivial(self):
        return self.llb_x + self.llb_y


def best_trip_order(dist: np.ndarray, home: int, stops, tol: float = DIST_TOL):
    """Cheapest visiting order of ``stops`` (at most three) from ``home``.

    Returns ``(cost, order)``; among equally cheap orders the lexicographically
    smallest is returned.
    """
    best = None
    for order in itertools.permutations(sorted(stops)):
        c = dist[home, order[0]] + dist[order[-1], home]
        for a, b in zip(order, order[1:]):
            c += dist[a, b]
        if best is None or c < best[0] - tol:
            best = (c, order)
    return best


def _subset_costs(dist: np.ndarray, home: int, opps: list[int]) -> np.ndarray:
    """Cheapest trip cost for every subset of ``opps`` of size 1..3 (inf otherwise)."""
    m = len(opps)
    cost = np.full(1 << m, np.inf)
    cost[0] = 0.0
    d = np.asarray(dist, dtype=float)
    for size in (1, 2, 3):
        for combo in itertools.combinations(range(m), size):
            mask = 0
            for k in combo:
                mask |= 1 << k
            cost[mask] = best_trip_order(d, home, [opps[k] for k in combo])[0]
    return cost


@njit(cache=True)
def _partition_dp(cost, m):
    full = (1 << m) - 1
    best = np.full(full + 1, np.inf)
    best[0] = 0.0
    for mask in range(1, full + 1):
        low = mask & -mask
        rest = mask ^ low
        b = best[rest] + cost[low]
        r1 = rest
        while r1:
            a = r1 & -r1
            r1 ^= a
            v = best[rest ^ a] + cost[low | a]
            if v < b:
                b = v
            r2 = r1
            while r2:
                c = r2 & -r2
                r2 ^= c
                v = best[rest ^ a ^ c] + cost[low | a | c]
                if v < b:
                    b = v
        best[mask] = b
    return best


def _reconstruct(best, cost, opps, tol):
    m = len(opps)
    mask = (1 << m) - 1
    chosen = []
    while mask:
        low = mask & -mask
        rest = [1 << k for k in range(m) if (mask >> k) & 1 and (1 << k) != low]
        options = [(low,)] + [(low, a) for a in rest] + [(low, a, c) for a, c in itertools.combinations(rest, 2)]
        fits = []
        for opt in options:
            sub = sum(opt)
            if abs(best[mask ^ sub] + cost[sub] - best[mask]) <= tol:
                members = sorted(opps[b.bit_length() - 1] for b in opt)
                fits.append((members, sub))
        members, sub = min(fits)
        chosen.append(members)
        mask ^= sub
    return chosen


def _number(value, inst: Instance):
    return int(round(value)) if inst.is_integral else float(value)


def ilb(team: int, inst: Instance, opponents=None) -> tuple[object, TripPlan]:
    """Exact individual lower bound of ``team`` and a plan achieving it.

    ``opponents`` defaults to the whole other league; passing a subset gives
    the cheapest cover of just those away games.
    """
    opps = sorted(inst.opponents(team) if opponents is None else opponents)
    if len(opps) > MAX_DP_OPPONENTS:
        raise CapacityError(f"{len(opps)} opponents exceed the DP capacity of {MAX_DP_OPPONENTS}")
    tol = 0.5 if inst.is_integral else DIST_TOL
    cost = _subset_costs(inst.dist, team, opps)
    best = _partition_dp(cost, len(opps))
    groups = _reconstruct(best, cost, opps, tol)
    d = np.asarray(inst.dist, dtype=float)
    trips = tuple(best_trip_order(d, team, g, tol)[1] for g in groups)
    value = _number(best[-1], inst)
    return value, TripPlan(team, trips, value)


def all_ilb(inst: Instance) -> tuple:
    return tuple(ilb(t, inst)[0] for t in range(inst.size))


def league_ilb_sum(league: str, inst: Instance):
    return sum(ilb(t, inst)[0] for t in inst.league_teams(league))


def bound_summary(inst: Instance) -> BoundSummary:
    vals = all_ilb(inst)
    return BoundSummary(vals, sum(vals[: inst.n]), sum(vals[inst.n:]))


def itinerary_excess(it: TeamItinerary, inst: Instance, ilb_value=None):
    """Travel of the itinerary above the team's ILB (never negative)."""
    if ilb_value is None:
        ilb_value = ilb(it.team, inst)[0]
    return team_travel_distance(it, inst) - ilb_value


def brute_force_ilb(team: int, inst: Instance):
    """Enumerate every ordered partition into trips of size <= 3 (oracle, n <= 9)."""
    opps = sorted(inst.opponents(team))
    if len(opps) > 9:
        raise CapacityError("brute-force ILB is limited to 9 opponents")
    d = inst.dist
    best = None

    def rec(remaining, acc):
        nonlocal best
        if not remaining:
            if best is None or acc < best:
                best = acc
            return
        first, rest = remaining[0], remaining[1:]
        for size in (0, 1, 2):
            for others in itertools.combinations(rest, size):
                group = (first,) + others
                left = tuple(o for o in rest if o not in others)
                for order in itertools.permutations(group):
                    c = d[team, order[0]] + d[order[-1], team]
                    for a, b in zip(order, order[1:]):
                        c += d[a, b]
                    rec(left, acc + c)

    rec(tuple(opps), 0)
    return _number(best, inst)
