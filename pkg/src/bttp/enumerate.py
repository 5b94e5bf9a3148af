"""Exhaustive enumeration of feasible schedules for very small leagues.

Schedules are generated in two stages.  First the opponent grid: a sequence
of 2n perfect matchings between the leagues in which every cross-league pair
meets exactly twice and never in adjacent slots.  Then the venues: for each
pair, which of its two meetings is hosted by the league-X team.  Venue
patterns violating the at-most-three rule are discarded.

Every schedule's travel is a linear function of the pairwise distances, so a
whole family is scored at once from a matrix of leg counts.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .constraints import MAX_STREAK
from .model import CapacityError, DIST_TOL, Instance, Schedule

MAX_ENUM_N = 4


@dataclass(frozen=True)
class ScheduleTable:
    """Every feasible schedule of one size, as stacked arrays.

    ``x_opp[i, x, s]`` is the league-Y opponent (0-based within Y) of X team
    ``x`` in slot ``s`` of schedule ``i`` and ``x_home`` the matching venue flag.
    ``legs[i]`` counts how often each unordered team pair is travelled between.
    """

    n: int
    x_opp: np.ndarray
    x_home: np.ndarray
    legs: np.ndarray
    trips: np.ndarray
    uniform: np.ndarray

    def __len__(self):
        return len(self.x_opp)

    def schedule(self, i: int) -> Schedule:
        n = self.n
        return Schedule.from_away_rows(n, self.x_opp[i] + n, self.x_home[i])

    def totals(self, dist) -> np.ndarray:
        return self.legs @ pair_vector(dist)


def pair_vector(dist) -> np.ndarray:
    d = np.asarray(dist, dtype=float)
    iu = np.triu_indices(len(d), 1)
    return d[iu]


def opponent_grids(n: int):
    """Opponent grids in lexicographic order of their slot permutations."""
    perms = list(itertools.permutations(range(n)))
    m = 2 * n
    count = np.zeros((n, n), dtype=int)
    grid: list = []

    def rec(s):
        if s == m:
            yield tuple(grid)
            return
        for p in perms:
            if grid and any(p[x] == grid[-1][x] for x in range(n)):
                continue
            if any(count[x, p[x]] >= 2 for x in range(n)):
                continue
            # every pair still short must fit in the remaining slots
            for x in range(n):
                count[x, p[x]] += 1
            left = m - s - 1
            if all(left >= (2 - count[x]).max() for x in range(n)):
                grid.append(p)
                yield from rec(s + 1)
                grid.pop()
            for x in range(n):
                count[x, p[x]] -= 1

    yield from rec(0)


def _long_streak(flags: np.ndarray) -> np.ndarray:
    """Rows (last axis = slots) with a run of equal flags longer than allowed."""
    w = MAX_STREAK + 1
    m = flags.shape[-1]
    bad = np.zeros(flags.shape[:-1], dtype=bool)
    for s in range(m - w + 1):
        win = flags[..., s:s + w]
        bad |= win.all(-1) | (~win).all(-1)
    return bad


@lru_cache(maxsize=None)
def _pattern_bits(n: int) -> np.ndarray:
    """All venue patterns, one row per pattern, pair x*n+y first (most significant)."""
    k = n * n
    ints = np.arange(1 << k, dtype=np.int64)
    return ((ints[:, None] >> np.arange(k - 1, -1, -1)) & 1).astype(bool)


def _venues_for_grid(n: int, grid):
    m = 2 * n
    opp = np.array(grid).T  # x, s
    first = np.full((n, n), -1)
    slot_home_bit = np.zeros((n, m), dtype=int)  # pair index used
    is_first = np.zeros((n, m), dtype=bool)
    for s in range(m):
        for x in range(n):
            y = opp[x, s]
            slot_home_bit[x, s] = x * n + y
            if first[x, y] < 0:
                first[x, y] = s
                is_first[x, s] = True
    bits = _pattern_bits(n)
    # bit set: X team hosts the first meeting of the pair
    x_home = bits[:, slot_home_bit] == is_first[None]
    ok = ~_long_streak(x_home).any(1)
    # league-Y rows: y is home exactly when its opponent is away
    y_home = np.zeros((len(bits), n, m), dtype=bool)
    for s in range(m):
        for x in range(n):
            y_home[:, opp[x, s], s] = ~x_home[:, x, s]
    ok &= ~_long_streak(y_home).any(1)
    return opp, x_home[ok]


def enumerate_all(n: int, uniform_only: bool = False):
    """Yield every feasible schedule for ``n`` teams per league exactly once."""
    if n > MAX_ENUM_N:
        raise CapacityError(f"exhaustive enumeration is limited to n <= {MAX_ENUM_N}")
    for grid in opponent_grids(n):
        opp, homes = _venues_for_grid(n, grid)
        for h in homes:
            if uniform_only and not (h == h[0]).all():
                continue
            yield Schedule.from_away_rows(n, opp + n, h)


def _legs_for(n, opp, homes):
    """Leg-count vectors and trip totals for one grid's venue patterns."""
    m = 2 * n
    teams = 2 * n
    pidx = np.full((teams, teams), -1, dtype=int)
    iu = np.triu_indices(teams, 1)
    pidx[iu] = np.arange(len(iu[0]))
    pidx[iu[1], iu[0]] = pidx[iu]
    k = len(homes)
    loc = np.empty((k, teams, m + 2), dtype=int)
    for t in range(teams):
        loc[:, t, 0] = t
        loc[:, t, -1] = t
    for s in range(m):
        for x in range(n):
            y = n + opp[x, s]
            h = homes[:, x, s]
            loc[:, x, s + 1] = np.where(h, x, y)
            loc[:, y, s + 1] = np.where(h, x, y)
    a, b = loc[:, :, :-1], loc[:, :, 1:]
    moving = a != b
    idx = pidx[a, b]
    legs = np.zeros((k, len(iu[0])), dtype=np.int16)
    rows = np.broadcast_to(np.arange(k)[:, None, None], idx.shape)
    np.add.at(legs, (rows[moving], idx[moving]), 1)
    return legs, moving.sum((1, 2))


@lru_cache(maxsize=4)
def schedule_table(n: int) -> ScheduleTable:
    """All feasible schedules of size ``n`` as arrays (cached)."""
    if n > 3:
        raise CapacityError("the stacked table is built for n <= 3 only")
    opps, homes_all, legs_all, trips_all = [], [], [], []
    for grid in opponent_grids(n):
        opp, homes = _venues_for_grid(n, grid)
        legs, trips = _legs_for(n, opp, homes)
        opps.append(np.broadcast_to(opp, (len(homes),) + opp.shape))
        homes_all.append(homes)
        legs_all.append(legs)
        trips_all.append(trips)
    x_home = np.concatenate(homes_all)
    uniform = (x_home == x_home[:, :1, :]).all((1, 2))
    return ScheduleTable(
        n,
        np.concatenate(opps),
        x_home,
        np.concatenate(legs_all).astype(np.float64),
        np.concatenate(trips_all),
        uniform,
    )


@dataclass(frozen=True)
class EnumerationResult:
    feasible_count: int
    uniform_count: int
    optimum: object
    optima: tuple
    trips: tuple[int, ...]
    tie: bool


def brute_optimum(inst: Instance, uniform_only: bool = False, tol: float = DIST_TOL) -> EnumerationResult:
    """Exact optimum by scoring every feasible schedule.

    ``tie`` is set when optimal schedules differ in their trip counts.
    """
    if inst.n > 3:
        raise CapacityError("brute force is limited to n <= 3")
    table = schedule_table(inst.n)
    totals = table.totals(inst.dist)
    pool = np.flatnonzero(table.uniform) if uniform_only else np.arange(len(table))
    best = totals[pool].min()
    hits = pool[totals[pool] <= best + tol]
    trips = tuple(int(t) for t in table.trips[hits])
    value = int(round(best)) if inst.is_integral else float(best)
    return EnumerationResult(
        len(table),
        int(table.uniform.sum()),
        value,
        tuple(table.schedule(i) for i in hits),
        trips,
        len(set(trips)) > 1,
    )


def pythagorean_instance(a: float, b: float, c: float) -> Instance:
    """Six teams: x1 = x2 at the origin, x3 at (2a, 0), y1 = y2 at (a, 0), y3 at (a, b)."""
    if min(a, b, c) < 0 or not math.isclose(a * a + b * b, c * c, rel_tol=1e-9, abs_tol=1e-9):
        raise ValueError("need nonnegative a, b, c with a^2 + b^2 = c^2")
    xs = [(0.0, 0.0), (0.0, 0.0), (2.0 * a, 0.0)]
    ys = [(a, 0.0), (a, 0.0), (a, b)]
    return Instance.from_coords(xs, ys)


SIX_POINT_X = ((8, 0), (9, 0), (0, 4))
SIX_POINT_Y = ((6, 1), (0, 7), (3, 5))


def six_point_instance() -> Instance:
    return Instance.from_coords(SIX_POINT_X, SIX_POINT_Y)


def six_point_closed_form() -> float:
    r = math.sqrt
    return 18 + 16 * r(5) + 16 * r(2) + 3 * r(13) + 5 * r(10) + 2 * r(130) + r(61)
