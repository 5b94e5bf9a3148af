"""Uniform (league-wide home/away) schedule construction for n divisible by 3.

Each league is cut into home triplets and away groups of three teams.  An away
group meets a home triplet in one block of three slots: every group member
plays the three hosts once, following a 3x3 Latin square.  Blocks alternate
between the two leagues travelling, so every team follows HHH-RRR or RRR-HHH.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .constraints import is_uniform, validate
from .model import DIST_TOL, CapacityError, Instance, Schedule, trip_cost

MAX_PACKING_TEAMS = 24
MAX_GROUPING_TEAMS = 15

# all twelve 3x3 Latin squares; row i lists the host positions visited by member i
LATIN_SQUARES = tuple(
    rows
    for rows in itertools.product(itertools.permutations(range(3)), repeat=3)
    if all(len({r[c] for r in rows}) == 3 for c in range(3))
)
CYCLIC_SQUARE = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


class AssemblyError(RuntimeError):
    """No arrangement of blocks satisfies the no-repeat rule."""


@dataclass(frozen=True)
class TrianglePacking:
    league: str
    triplets: tuple[tuple[int, int, int], ...]
    weight: object


@dataclass(frozen=True)
class BlockChoice:
    """Cheapest Latin squares for one away group meeting one home triplet."""

    cost: object
    squares: tuple


@dataclass(frozen=True)
class UniformPlan:
    x_home: tuple[tuple[int, ...], ...]
    y_home: tuple[tuple[int, ...], ...]
    x_away: tuple[tuple[int, ...], ...]
    y_away: tuple[tuple[int, ...], ...]
    x_travel: object
    y_travel: object

    @property
    def total(self):
        return self.x_travel + self.y_travel


def _check_league(inst: Instance, league: str, limit: int):
    teams = list(inst.league_teams(league))
    if len(teams) % 3:
        raise ValueError("league size must be divisible by 3")
    if len(teams) > limit:
        raise CapacityError(f"{len(teams)} teams exceed the limit of {limit}")
    return teams


def _tol(inst):
    return 0.5 if inst.is_integral else DIST_TOL


def _num(v, inst):
    return int(round(v)) if inst.is_integral else float(v)


def _partition_into_triples(teams, cost):
    """Exact minimum-cost partition of ``teams`` into triples (subset DP)."""
    m = len(teams)
    cost = lru_cache(maxsize=None)(cost)

    @lru_cache(maxsize=None)
    def best(mask):
        if mask == 0:
            return 0.0, ()
        low = (mask & -mask).bit_length() - 1
        rest = [k for k in range(low + 1, m) if mask >> k & 1]
        out = None
        for a, b in itertools.combinations(rest, 2):
            sub, tail = best(mask & ~(1 << low | 1 << a | 1 << b))
            c = sub + cost((teams[low], teams[a], teams[b]))
            if out is None or c < out[0] - 1e-12:
                out = (c, ((teams[low], teams[a], teams[b]),) + tail)
        return out

    value, triples = best((1 << m) - 1)
    best.cache_clear()
    return value, triples


def min_triangle_packing(league: str, inst: Instance) -> TrianglePacking:
    """Partition a league into triples minimising the sum of open-path lengths.

    A triple's weight is its cheapest Hamiltonian path: the cost a visitor
    pays between the three stops of a road trip.
    """
    teams = _check_league(inst, league, MAX_PACKING_TEAMS)
    d = np.asarray(inst.dist, dtype=float)

    def path(tr):
        a, b, c = tr
        edges = (d[a, b], d[b, c], d[a, c])
        return sum(edges) - max(edges)

    value, triples = _partition_into_triples(teams, path)
    return TrianglePacking(league, triples, _num(value, inst))


def block_choice(inst: Instance, group, hosts) -> BlockChoice:
    """Cost of ``group`` touring ``hosts`` in one block, and every square achieving it."""
    d = inst.dist
    tol = _tol(inst)
    costs = []
    for sq in LATIN_SQUARES:
        costs.append(sum(trip_cost(d, g, [hosts[k] for k in row]) for g, row in zip(group, sq)))
    low = min(costs)
    squares = tuple(sq for sq, c in zip(LATIN_SQUARES, costs) if c <= low + tol)
    return BlockChoice(_num(low, inst), squares)


def away_travel(inst: Instance, groups, home_triplets):
    """Travel of the away league when every group meets every home triplet once."""
    return sum(block_choice(inst, g, h).cost for g in groups for h in home_triplets)


def optimize_grouping(away_league: str, home_triplets, inst: Instance):
    """Best partition of the away league into groups of three.

    Returns ``(groups, travel)``.  The search is exact (subset DP over the
    away league), so the result is the true minimum under block assembly.
    """
    teams = _check_league(inst, away_league, MAX_GROUPING_TEAMS)
    home_triplets = tuple(tuple(h) for h in home_triplets)

    value, groups = _partition_into_triples(teams, lambda g: away_travel(inst, [g], home_triplets))
    return groups, _num(value, inst)


def consecutive_triplets(league: str, inst: Instance):
    teams = list(inst.league_teams(league))
    return tuple(tuple(teams[i:i + 3]) for i in range(0, len(teams), 3))


def baseline_plan(inst: Instance) -> UniformPlan:
    """Plan that uses the same consecutive-index triples for hosting and travelling."""
    xs, ys = consecutive_triplets("X", inst), consecutive_triplets("Y", inst)
    return UniformPlan(xs, ys, xs, ys, away_travel(inst, xs, ys), away_travel(inst, ys, xs))


def build_plan(inst: Instance) -> UniformPlan:
    """Packings for the home triplets, optimised groupings for the travellers."""
    x_home = min_triangle_packing("X", inst).triplets
    y_home = min_triangle_packing("Y", inst).triplets
    x_away, x_travel = optimize_grouping("X", y_home, inst)
    y_away, y_travel = optimize_grouping("Y", x_home, inst)
    return UniformPlan(x_home, y_home, x_away, y_away, x_travel, y_travel)


# ---------------------------------------------------------------- assembly


@dataclass
class _Pair:
    away: tuple
    hosts: tuple
    variants: list  # each variant: per-member tuple of hosts in slot order


@dataclass
class _Half:
    rounds: list  # list of list[_Pair]
    fixed_order: bool = False


def _pairs_for_rounds(inst, groups, homes):
    g = len(groups)
    rounds = []
    for r in range(g):
        pairs = []
        for a, grp in enumerate(groups):
            hosts = homes[(a + r) % g]
            choice = block_choice(inst, grp, hosts)
            variants = [tuple(tuple(hosts[k] for k in row) for row in sq) for sq in choice.squares]
            pairs.append(_Pair(tuple(grp), tuple(hosts), variants))
        rounds.append(pairs)
    return rounds


def _arrange(halves):
    """Order rounds and pick Latin variants so no pair meets in adjacent slots."""
    g = len(halves[0].rounds)
    used = [set(), set()]
    placed = []

    def first_last(pair, var):
        firsts, lasts = {}, {}
        for member, hosts in zip(pair.away, var):
            firsts[member], firsts[hosts[0]] = hosts[0], member
            lasts[member], lasts[hosts[2]] = hosts[2], member
        return firsts, lasts

    def fill_round(pairs, k, prev, acc_last, chosen):
        if k == len(pairs):
            yield dict(acc_last), list(chosen)
            return
        for var in pairs[k].variants:
            firsts, lasts = first_last(pairs[k], var)
            if any(prev.get(t) == o for t, o in firsts.items()):
                continue
            acc_last.update(lasts)
            chosen.append(var)
            yield from fill_round(pairs, k + 1, prev, acc_last, chosen)
            chosen.pop()

    def dfs(p, prev):
        if p == 2 * g:
            return True
        half = halves[p % 2]
        options = [p // 2] if half.fixed_order else [r for r in range(g) if r not in used[p % 2]]
        for r in options:
            used[p % 2].add(r)
            for last, chosen in fill_round(half.rounds[r], 0, prev, {}, []):
                placed.append((r, chosen))
                if dfs(p + 1, last):
                    return True
                placed.pop()
            used[p % 2].discard(r)
        return False

    if not dfs(0, {}):
        raise AssemblyError("no block order avoids back-to-back repeats")
    return placed


def _emit(n, halves, placed):
    m = 2 * n
    opp = np.full((m, m), -1, dtype=np.int64)
    home = np.zeros((m, m), dtype=bool)
    for p, (r, chosen) in enumerate(placed):
        pairs = halves[p % 2].rounds[r]
        for pair, var in zip(pairs, chosen):
            for member, hosts in zip(pair.away, var):
                for c, h in enumerate(hosts):
                    s = 3 * p + c
                    opp[member, s], home[member, s] = h, False
                    opp[h, s], home[h, s] = member, True
    return Schedule(n, opp, home)


def assemble(plan: UniformPlan, inst: Instance, x_home_first: bool = True) -> Schedule:
    """Uniform schedule realising ``plan``; travel equals ``plan.total``."""
    n = inst.n
    if n % 3:
        raise ValueError("league size must be divisible by 3")
    for part in (plan.x_home, plan.y_home, plan.x_away, plan.y_away):
        if len(part) != n // 3:
            raise ValueError("plan must split each league into n/3 triples")
    y_trav = _Half(_pairs_for_rounds(inst, plan.y_away, plan.x_home))
    x_trav = _Half(_pairs_for_rounds(inst, plan.x_away, plan.y_home))
    halves = [y_trav, x_trav] if x_home_first else [x_trav, y_trav]
    sched = _emit(n, halves, _arrange(halves))
    report = validate(sched)
    if report or not is_uniform(sched):
        raise AssemblyError(f"assembled schedule is infeasible:\n{report}")
    return sched


def construct(inst: Instance, x_home_first: bool = True):
    """Full pipeline: packings, grouping search, assembly.  Returns ``(plan, schedule)``."""
    plan = build_plan(inst)
    return plan, assemble(plan, inst, x_home_first)


# ------------------------------------------------------- reduction schedule


def lemma4_assemble(k: int, triples, x_teams, p_teams, q_teams, r_teams, inst: Instance) -> Schedule:
    """Uniform schedule for a reduction instance whose p-rooted cover is known.

    ``triples`` lists the 6k cover cycles as ordered vertex triples: first the
    3k (a, u, b) cycles, then 2k (u, c, d), then k (u, e, f), each in the
    order the p-team visits them.  The three roots' teams are given as lists
    of 6k team indices.  League X is at home for the first block.
    """
    g = 6 * k
    if len(triples) != g or any(len(t) != 3 for t in triples):
        raise ValueError(f"expected {g} cover triples")
    if not (len(p_teams) == len(q_teams) == len(r_teams) == g):
        raise ValueError(f"expected {g} teams at each root")
    if sorted(v for t in triples for v in t) != sorted(x_teams):
        raise ValueError("cover triples must partition league X")
    xs = [v for t in triples for v in t]

    def x(idx):
        return xs[idx % (3 * g)]

    # league Y travels: group i = (p_i, q_i, r_i) meets X triple (i + j) in round j
    y_rounds = []
    for j in range(g):
        pairs = []
        for i in range(g):
            tau = (i + j) % g
            base = 3 * tau
            p_row = (x(base), x(base + 1), x(base + 2))
            if tau < 5 * k:
                q_row = (x(base + 1), x(base + 2), x(base))
                r_row = (x(base + 2), x(base), x(base + 1))
            else:
                q_row = (x(base + 2), x(base), x(base + 1))
                r_row = (x(base + 1), x(base + 2), x(base))
            var = (p_row, q_row, r_row)
            away = (p_teams[i], q_teams[i], r_teams[i])
            pairs.append(_Pair(away, tuple(triples[tau]), [var]))
        y_rounds.append(pairs)

    # league X travels: X triple a meets Y triple (a + j); colocated hosts make every square equal
    y_triples = [tuple(ts[i:i + 3]) for ts in (p_teams, q_teams, r_teams) for i in range(0, g, 3)]
    x_rounds = []
    for j in range(g):
        pairs = []
        for a, tr in enumerate(triples):
            hosts = y_triples[(a + j) % g]
            variants = [tuple(tuple(hosts[c] for c in row) for row in sq) for sq in LATIN_SQUARES]
            pairs.append(_Pair(tuple(tr), hosts, variants))
        x_rounds.append(pairs)

    halves = [_Half(y_rounds, fixed_order=True), _Half(x_rounds)]
    sched = _emit(inst.n, halves, _arrange(halves))
    report = validate(sched)
    if report or not is_uniform(sched):
        raise AssemblyError(f"assembled schedule is infeasible:\n{report}")
    return sched
