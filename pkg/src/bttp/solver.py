"""Exact solver for small leagues (n = 6) built on excess bounds.

A team itinerary is a home/away pattern plus the order of its away
opponents; its excess is travel above the team's individual lower bound.
The solver keeps only itineraries whose excess fits a global budget M,
fixes the home sets of a few teams at a time (a global constraint), tightens
every other team's candidate list with the sum of per-team minimum excesses,
and joins the survivors into full schedules.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numba import njit

from .bounds import ilb
from .constraints import MAX_STREAK
from .model import CapacityError, Instance, Schedule

MAX_SOLVER_N = 8
INF = np.iinfo(np.int64).max // 4


# ------------------------------------------------------------ patterns


@lru_cache(maxsize=None)
def away_patterns(n: int) -> tuple[int, ...]:
    """Bit masks (bit s = away in slot s) with n away slots and no run above three."""
    m = 2 * n
    out = []
    for slots in itertools.combinations(range(m), n):
        mask = sum(1 << s for s in slots)
        flags = [(mask >> s) & 1 for s in range(m)]
        run, ok = 1, True
        for s in range(1, m):
            run = run + 1 if flags[s] == flags[s - 1] else 1
            if run > MAX_STREAK:
                ok = False
                break
        if ok:
            out.append(mask)
    return tuple(out)


def away_slots(mask: int, m: int) -> tuple[int, ...]:
    return tuple(s for s in range(m) if mask >> s & 1)


def in_blocks_of_three(mask: int, m: int) -> bool:
    """True when every road trip in the pattern has exactly three games."""
    s = 0
    while s < m:
        if mask >> s & 1:
            e = s
            while e < m and mask >> e & 1:
                e += 1
            if e - s != 3:
                return False
            s = e
        else:
            s += 1
    return True


@lru_cache(maxsize=None)
def _perms(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int8)


# ------------------------------------------------------------ spaces


@dataclass
class ScheduleSpace:
    """Every itinerary of one team with its excess.

    Row ``i`` pairs pattern ``pat[i]`` (index into ``patterns``) with away
    order ``order[i]`` (opponent offsets within the other league).
    ``visit[i, o]`` is the slot in which the team plays at opponent ``o``.
    """

    team: int
    n: int
    patterns: tuple[int, ...]
    pat: np.ndarray
    order: np.ndarray
    excess: np.ndarray
    visit: np.ndarray

    def __len__(self):
        return len(self.pat)

    def take(self, idx) -> "ScheduleSpace":
        return ScheduleSpace(self.team, self.n, self.patterns, self.pat[idx], self.order[idx], self.excess[idx], self.visit[idx])

    def mask(self, i) -> int:
        return self.patterns[self.pat[i]]

    @property
    def bound(self):
        return self.excess.min().item() if len(self) else INF


def _join_bits(mask: int, m: int, n: int) -> tuple[bool, ...]:
    slots = away_slots(mask, m)
    return tuple(slots[k + 1] == slots[k] + 1 for k in range(n - 1))


def full_space(team: int, inst: Instance, limit=None) -> ScheduleSpace:
    """All itineraries of ``team`` with excess at most ``limit`` (all when None)."""
    n = inst.n
    if n > MAX_SOLVER_N:
        raise CapacityError(f"itinerary spaces are limited to n <= {MAX_SOLVER_N}")
    m = 2 * n
    pats = away_patterns(n)
    perms = _perms(n)
    opps = np.array(list(inst.opponents(team)))
    d = np.asarray(inst.dist, dtype=np.float64)
    P = opps[perms]  # actual team ids in visiting order
    first = d[team, P[:, 0]] + d[P[:, -1], team]
    chain = np.stack([d[P[:, k], P[:, k + 1]] for k in range(n - 1)], 1)
    split = np.stack([d[P[:, k], team] + d[team, P[:, k + 1]] for k in range(n - 1)], 1)
    base = ilb(team, inst)[0]
    cache = {}
    pat_rows, ord_rows, exc_rows = [], [], []
    for pi, mask in enumerate(pats):
        jb = _join_bits(mask, m, n)
        if jb not in cache:
            travel = first + np.where(np.array(jb)[None, :], chain, split).sum(1)
            cache[jb] = np.rint(travel - base).astype(np.int64) if inst.is_integral else travel - base
        exc = cache[jb]
        keep = np.arange(len(perms)) if limit is None else np.flatnonzero(exc <= limit)
        pat_rows.append(np.full(len(keep), pi, dtype=np.int32))
        ord_rows.append(keep.astype(np.int32))
        exc_rows.append(exc[keep])
    pat = np.concatenate(pat_rows)
    order = np.concatenate(ord_rows)
    excess = np.concatenate(exc_rows)
    slot_table = np.array([away_slots(mask, m) for mask in pats], dtype=np.int8)
    visit = np.empty((len(pat), n), dtype=np.int8)
    seq = perms[order]
    slots = slot_table[pat]
    rows = np.arange(len(pat))[:, None]
    visit[rows, seq] = slots
    return ScheduleSpace(team, n, pats, pat, order, excess, visit)


def excess_table(team: int, inst: Instance) -> np.ndarray:
    """Excess of every (pattern, away order) pair, shape (patterns, n!)."""
    sp = full_space(team, inst)
    return sp.excess.reshape(len(sp.patterns), -1)


def _space_from_table(team: int, n: int, table: np.ndarray, limit) -> ScheduleSpace:
    m = 2 * n
    pats = away_patterns(n)
    perms = _perms(n)
    pi, oi = np.nonzero(table <= limit + _eps(table))
    slot_table = np.array([away_slots(mask, m) for mask in pats], dtype=np.int8)
    visit = np.empty((len(pi), n), dtype=np.int8)
    visit[np.arange(len(pi))[:, None], perms[oi]] = slot_table[pi]
    return ScheduleSpace(team, n, pats, pi.astype(np.int32), oi.astype(np.int32), table[pi, oi], visit)


def _eps(arr) -> float:
    return 0.0 if np.asarray(arr).dtype.kind in "iu" else 1e-7


# ------------------------------------------------------------ global constraints


@dataclass(frozen=True)
class GlobalConstraint:
    """A set of fixed matches ``(slot, home team, away team)``."""

    matches: frozenset = frozenset()

    @classmethod
    def from_home_sets(cls, sched, teams) -> "GlobalConstraint":
        """Fix every home game of ``teams`` as played in ``sched``."""
        out = set()
        for t in teams:
            for s in range(sched.slot_count):
                if sched.home[t, s]:
                    out.add((s, int(t), int(sched.opp[t, s])))
        return cls(frozenset(out))

    def __len__(self):
        return len(self.matches)


def build_space(team: int, inst: Instance, gamma: GlobalConstraint | None = None, limit=None) -> ScheduleSpace:
    """Itineraries of ``team`` consistent with ``gamma`` and excess at most ``limit``."""
    space = full_space(team, inst, limit)
    if not gamma:
        return space
    n = inst.n
    opps = inst.opponents(team)
    keep = np.ones(len(space), dtype=bool)
    masks = np.array(space.patterns, dtype=np.int64)[space.pat]
    for s, h, a in gamma.matches:
        for t in (h, a):
            if not 0 <= t < 2 * n:
                raise ValueError(f"team index {t} out of range")
        if inst.league(h) == inst.league(a):
            raise ValueError("a fixed match must pair teams of different leagues")
        if a == team:
            keep &= space.visit[:, h - opps.start] == s
        elif h == team:
            keep &= (masks >> s & 1) == 0
        else:
            if h in opps:
                keep &= space.visit[:, h - opps.start] != s
            if a in opps:
                keep &= space.visit[:, a - opps.start] != s
    return space.take(np.flatnonzero(keep))


# ------------------------------------------------------------ proposition 1


@dataclass
class FilterResult:
    """Candidate sets Z_t with the per-team bounds that produced them."""

    spaces: dict
    bounds: dict
    total_bound: object
    thresholds: dict

    @property
    def empty(self) -> bool:
        return any(len(z) == 0 for z in self.spaces.values())


def prop1_filter(spaces: dict, M) -> FilterResult:
    """Keep itineraries with excess at most ``M + B_t - sum_u B_u``.

    ``spaces`` maps team to its consistent itineraries; B_t is the least
    excess in a team's set.  Sound for any schedule of total excess <= M.
    """
    bounds = {t: sp.bound for t, sp in spaces.items()}
    if any(b >= INF for b in bounds.values()):
        return FilterResult({t: sp.take(np.array([], dtype=int)) for t, sp in spaces.items()}, bounds, INF, {t: -1 for t in spaces})
    total = sum(bounds.values())
    thresholds, out = {}, {}
    for t, sp in spaces.items():
        thr = M + bounds[t] - total
        thresholds[t] = thr
        out[t] = sp.take(np.flatnonzero(sp.excess <= thr + _eps(sp.excess)))
    return FilterResult(out, bounds, total, thresholds)


# ------------------------------------------------------------ proposition 2


def pattern_text(mask: int, m: int) -> str:
    """Render a pattern like ``HH-RRR-HH-RRR-HH``."""
    chars = ["R" if mask >> s & 1 else "H" for s in range(m)]
    out = chars[:1]
    for s in range(1, m):
        if chars[s] != chars[s - 1]:
            out.append("-")
        out.append(chars[s])
    return "".join(out)


def r3_only(space: ScheduleSpace) -> bool:
    m = 2 * space.n
    ok = {p: in_blocks_of_three(space.patterns[p], m) for p in np.unique(space.pat)}
    return all(ok.values())


def _consecutive(space: ScheduleSpace, a: int, b: int) -> np.ndarray:
    return np.abs(space.visit[:, a].astype(int) - space.visit[:, b]) == 1


def _arrangement_rows(n: int, pattern_ids) -> tuple[np.ndarray, np.ndarray]:
    """Host slot per opponent for every (pattern, home order) choice."""
    m = 2 * n
    perms = _perms(n)
    pats = away_patterns(n)
    pid, host = [], []
    for p in pattern_ids:
        hs = np.array([s for s in range(m) if not pats[p] >> s & 1], dtype=np.int8)
        rows = np.empty((len(perms), n), dtype=np.int8)
        rows[np.arange(len(perms))[:, None], perms] = hs
        pid.append(np.full(len(perms), p, dtype=np.int32))
        host.append(rows)
    if not pid:
        return np.zeros(0, dtype=np.int32), np.zeros((0, n), dtype=np.int8)
    return np.concatenate(pid), np.concatenate(host)


def _visit_table(space: ScheduleSpace, a: int, b: int) -> np.ndarray:
    m = 2 * space.n
    table = np.zeros((m, m), dtype=bool)
    table[space.visit[:, a], space.visit[:, b]] = True
    return table


def _pair_hits(rows_a, rows_b, tables) -> list[tuple[int, int]]:
    """Arrangement pairs whose visit slots are allowed by every opponent's table."""
    out = []
    for i in range(len(rows_a)):
        good = np.ones(len(rows_b), dtype=bool)
        for o, tab in enumerate(tables):
            good &= tab[rows_a[i, o], rows_b[:, o]]
            if not good.any():
                break
        out.extend((i, int(k)) for k in np.flatnonzero(good))
    return out


@dataclass
class Prop2Result:
    holds: bool
    pair: tuple[int, int] | None
    failures: tuple[str, ...]
    exceptions: dict  # opponent team -> least excess among non-consecutive visits
    patterns: tuple[str, ...] = ()
    arrangements: int = 0


def prop2_screen(inst: Instance, M, far_pair=None, spaces=None) -> Prop2Result:
    """Check whether two league-X teams are forced into a paired pattern.

    The hypotheses: both teams only have road trips of three within budget M,
    and every league-Y itinerary within M visits them in consecutive slots.
    When they hold, every consistent pair of home-set choices is listed and
    the patterns that occur are returned.  Opponents whose non-consecutive
    itineraries still fit the budget are reported in ``exceptions``.
    """
    n = inst.n
    if spaces is None:
        spaces = {t: full_space(t, inst, M) for t in range(2 * n)}
    pairs = [far_pair] if far_pair is not None else list(itertools.combinations(range(n), 2))
    best = None
    for a, b in pairs:
        fails = []
        for t in (a, b):
            if not len(spaces[t]):
                fails.append(f"{inst.team_names[t]} has no itinerary within the budget")
            elif not r3_only(spaces[t]):
                fails.append(f"{inst.team_names[t]} has an itinerary outside three-game road trips")
        exc = {}
        for y in inst.league_teams("Y"):
            sp = spaces[y]
            loose = sp.excess[~_consecutive(sp, a, b)]
            if len(loose):
                exc[y] = loose.min().item()
        if exc:
            names = ", ".join(inst.team_names[y] for y in exc)
            fails.append(f"non-consecutive visits fit the budget for {names}")
        key = (len(fails), len(exc), -float(inst.dist[a, b]))
        if best is None or key < best[0]:
            best = (key, (a, b), tuple(fails), exc)
    _, (a, b), fails, exc = best
    if any("three-game" in f or "no itinerary" in f for f in fails):
        return Prop2Result(False, (a, b), fails, exc)
    tables = []
    for y in inst.league_teams("Y"):
        sp = spaces[y]
        tables.append(_visit_table(sp.take(np.flatnonzero(_consecutive(sp, a, b))), a, b))
    pa, ra = _arrangement_rows(n, np.unique(spaces[a].pat))
    pb, rb = _arrangement_rows(n, np.unique(spaces[b].pat))
    hits = _pair_hits(ra, rb, tables)
    m = 2 * n
    pats = away_patterns(n)
    shapes = sorted({pattern_text(pats[pa[i]], m) for i, _ in hits} | {pattern_text(pats[pb[k]], m) for _, k in hits})
    return Prop2Result(not exc, (a, b), fails, exc, tuple(shapes), len(hits))


def exception_pairs(inst: Instance, M, pair, loose_team, spaces=None) -> list:
    """Home-set pairs for ``pair`` open only to a non-consecutive ``loose_team``.

    Both teams use three-game road trips; ``loose_team`` visits them in
    non-consecutive slots with excess within M, every other league-Y team in
    consecutive slots.  Returns (pattern_a, host_a, pattern_b, host_b) tuples.
    """
    n = inst.n
    a, b = pair
    if spaces is None:
        spaces = {t: full_space(t, inst, M) for t in range(2 * n)}
    m = 2 * n
    r3 = [p for p, mask in enumerate(away_patterns(n)) if in_blocks_of_three(mask, m)]
    tables = []
    for y in inst.league_teams("Y"):
        sp = spaces[y]
        cons = _consecutive(sp, a, b)
        sel = ~cons if y == loose_team else cons
        tables.append(_visit_table(sp.take(np.flatnonzero(sel)), a, b))
    pa, ra = _arrangement_rows(n, r3)
    pb, rb = _arrangement_rows(n, r3)
    return [(int(pa[i]), ra[i], int(pb[k]), rb[k]) for i, k in _pair_hits(ra, rb, tables)]


# ------------------------------------------------------------ exact search


@dataclass
class SearchStats:
    budget: object = None
    fixed: tuple = ()
    scenarios: int = 0
    joins: int = 0
    central_tuples: int = 0
    found: int = 0
    seconds: float = 0.0


@dataclass
class SolveResult:
    """Outcome of an exact solve.

    ``schedules`` holds every schedule of least excess (reversals included);
    ``canonical`` keeps one of each schedule/reversal pair.
    """

    optimum: object
    excess: object
    ilb_total: object
    schedules: list
    canonical: list
    budget: object
    stats: list = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.schedules)


def _lower_bounds(spaces: dict) -> dict:
    return {t: sp.bound for t, sp in spaces.items()}


def _bound_tables(spaces_y: list, fixed_off: list, m: int) -> list:
    """Least excess of each league-Y team keyed by its visit slots to fixed teams.

    ``tables[k][y]`` covers the first k+1 fixed teams, flattened base-m.
    """
    out = []
    for k in range(len(fixed_off)):
        level = []
        for sp in spaces_y:
            tab = np.full(m ** (k + 1), INF, dtype=np.float64)
            if len(sp):
                idx = np.zeros(len(sp), dtype=np.int64)
                for x in fixed_off[: k + 1]:
                    idx = idx * m + sp.visit[:, x]
                np.minimum.at(tab, idx, sp.excess.astype(np.float64))
            level.append(tab)
        out.append(level)
    return out


@njit(cache=True)
def _extend(keys, spent, prev_hosts, home_lookup, partial_ok, pb, tab, m, slack):
    """Extend partial scenarios by every host assignment of one more team.

    Opponents are given distinct host slots depth-first; ``tab[o]`` prices
    opponent o visiting in a slot given its earlier visits.  The home-slot
    set must be a pattern (``home_lookup`` maps its bit mask to a row of
    ``pb``, or -1); ``partial_ok`` marks slot sets contained in some
    pattern.  Branches whose spent bound plus cheapest completion exceed
    ``slack`` are cut.  Returns (partial index, pattern row, host slots).
    """
    out_p = [np.int64(0) for _ in range(0)]
    out_q = [np.int64(0) for _ in range(0)]
    out_h = [np.int64(0) for _ in range(0)]
    n = keys.shape[1]
    depth = prev_hosts.shape[1]
    big = np.inf
    min_pb = big
    for q in range(pb.shape[0]):
        if pb[q] < min_pb:
            min_pb = pb[q]
    cost = np.empty((n, m))
    rest = np.empty(n + 1)
    col = np.empty(n, dtype=np.int64)
    acc = np.empty(n + 1)
    for p in range(keys.shape[0]):
        for o in range(n):
            for s in range(m):
                c = tab[o, keys[p, o] * m + s]
                for d in range(depth):
                    if prev_hosts[p, d, o] == s:
                        c = big
                cost[o, s] = c
        rest[n] = 0.0
        for o in range(n - 1, -1, -1):
            lo = big
            for s in range(m):
                if cost[o, s] < lo:
                    lo = cost[o, s]
            rest[o] = rest[o + 1] + lo
        base = spent[p] + min_pb
        if rest[0] == big or base + rest[0] > slack:
            continue
        o = 0
        col[0] = -1
        acc[0] = spent[p]
        used = 0
        while o >= 0:
            if col[o] >= 0:
                used &= ~(1 << col[o])
            s = col[o] + 1
            while s < m:
                if not (used >> s) & 1 and cost[o, s] < big and partial_ok[used | (1 << s)]:
                    if acc[o] + cost[o, s] + rest[o + 1] + min_pb <= slack:
                        break
                s += 1
            if s == m:
                col[o] = -1
                o -= 1
                continue
            col[o] = s
            used |= 1 << s
            acc[o + 1] = acc[o] + cost[o, s]
            if o == n - 1:
                q = home_lookup[used]
                if q >= 0 and acc[n] + pb[q] <= slack:
                    out_p.append(p)
                    out_q.append(q)
                    for oo in range(n):
                        out_h.append(col[oo])
            else:
                o += 1
                col[o] = -1
    hosts = np.array(out_h, dtype=np.int64).reshape(-1, n)
    return np.array(out_p, dtype=np.int64), np.array(out_q, dtype=np.int64), hosts

@njit(cache=True)
def _complete(host, pat_of, y_home, x_tables, perms, slot_tab, x_thr, budget, spent_y, out_rows, out_tot):
    """Every assignment of league-X away orders that fits the remaining budget.

    ``host[x, o]`` is the slot in which x hosts league-Y team o and
    ``y_home[o, s]`` whether o is at home in slot s.  Each survivor is
    appended to ``out_rows`` as patterns, away orders and host slots.
    """
    n = host.shape[0]
    nperm = perms.shape[0]
    cand = np.empty((n, nperm), dtype=np.int64)
    count = np.zeros(n, dtype=np.int64)
    low = np.empty(n)
    for x in range(n):
        p = pat_of[x]
        best = np.inf
        for f in range(nperm):
            e = x_tables[x, p, f]
            if e > x_thr[x]:
                continue
            ok = True
            for k in range(n):
                y = perms[f, k]
                s = slot_tab[p, k]
                if not y_home[y, s] or abs(host[x, y] - s) == 1:
                    ok = False
                    break
            if ok:
                cand[x, count[x]] = f
                count[x] += 1
                if e < best:
                    best = e
        if count[x] == 0:
            return
        low[x] = best
    order = np.argsort(count)
    rest = np.zeros(n + 1)
    for i in range(n - 1, -1, -1):
        rest[i] = rest[i + 1] + low[order[i]]
    used = np.zeros(n, dtype=np.int64)  # per league-Y team, occupied home slots
    pos = np.full(n, -1, dtype=np.int64)
    acc = np.empty(n + 1)
    acc[0] = spent_y
    level = 0
    while level >= 0:
        x = order[level]
        p = pat_of[x]
        if pos[level] >= 0:
            f = cand[x, pos[level]]
            for k in range(n):
                used[perms[f, k]] &= ~(1 << slot_tab[p, k])
        j = pos[level] + 1
        limit = budget - acc[level] - rest[level + 1]
        while j < count[x]:
            f = cand[x, j]
            if x_tables[x, p, f] <= limit:
                free = True
                for k in range(n):
                    if used[perms[f, k]] >> slot_tab[p, k] & 1:
                        free = False
                        break
                if free:
                    break
            j += 1
        if j == count[x]:
            pos[level] = -1
            level -= 1
            continue
        pos[level] = j
        f = cand[x, j]
        for k in range(n):
            used[perms[f, k]] |= 1 << slot_tab[p, k]
        acc[level + 1] = acc[level] + x_tables[x, p, f]
        if level == n - 1:
            for xx in range(n):
                out_rows.append(pat_of[xx])
            for i in range(n):
                out_rows.append(cand[order[i], pos[i]] * n + order[i])
            for xx in range(n):
                for o in range(n):
                    out_rows.append(host[xx, o])
            out_tot.append(acc[n])
        else:
            level += 1
            pos[level] = -1


@njit(cache=True)
def _join(pat_ids, host_rows, fixed, seg, y_key, y_exc, y_visit, y_mask, pat_bound, lb_x,
          x_tables, pattern_index, perms, slot_tab, budget, eps, prune):
    """Join league-Y itineraries and league-X away orders for each scenario.

    A scenario fixes the pattern (``pat_ids``) and host slots (``host_rows``)
    of the teams in ``fixed``.  League-Y rows of team o live in
    ``seg[o]:seg[o + 1]`` sorted by ``y_key``, their visit slots to the fixed
    teams in base m.  Returns (rows, totals, joins, tuples).
    """
    out_rows = [np.int64(0) for _ in range(0)]
    out_tot = [np.float64(0.0) for _ in range(0)]
    n = lb_x.shape[0]
    m = 2 * n
    nfix = fixed.shape[0]
    full = (1 << m) - 1
    is_fixed = np.full(n, -1, dtype=np.int64)
    for j in range(nfix):
        is_fixed[fixed[j]] = j
    lo = np.empty(n, dtype=np.int64)
    hi = np.empty(n, dtype=np.int64)
    by = np.empty(n)
    bx = np.empty(n)
    thr = np.empty(n)
    x_thr = np.empty(n)
    cnt = np.empty(n, dtype=np.int64)
    cand = np.empty((n, y_exc.shape[0]), dtype=np.int64)
    picks = np.empty(n, dtype=np.int64)
    pos = np.empty(n, dtype=np.int64)
    acc = np.empty(n + 1)
    host_mask = np.zeros(n, dtype=np.int64)
    host = np.empty((n, n), dtype=np.int64)
    pat_of = np.empty(n, dtype=np.int64)
    y_home = np.empty((n, m), dtype=np.bool_)
    joins = 0
    tuples = 0
    for sc in range(pat_ids.shape[0]):
        for x in range(n):
            bx[x] = lb_x[x]
        for j in range(nfix):
            bx[fixed[j]] = pat_bound[fixed[j], pat_ids[sc, j]]
        empty = False
        for o in range(n):
            key = 0
            for j in range(nfix):
                key = key * m + host_rows[sc, j, o]
            part = y_key[seg[o]:seg[o + 1]]
            lo[o] = seg[o] + np.searchsorted(part, key)
            hi[o] = seg[o] + np.searchsorted(part, key, side="right")
            if hi[o] == lo[o]:
                empty = True
                break
            b = np.inf
            for r in range(lo[o], hi[o]):
                if y_exc[r] < b:
                    b = y_exc[r]
            by[o] = b
        if empty:
            continue
        if prune:
            total = by.sum() + bx.sum()
            if total > budget + eps:
                continue
            for o in range(n):
                thr[o] = budget - (total - by[o]) + eps
            for x in range(n):
                x_thr[x] = budget - (total - bx[x]) + eps
            x_floor = bx.sum()
        else:
            for o in range(n):
                thr[o] = budget + eps
            for x in range(n):
                x_thr[x] = budget + eps
            x_floor = 0.0
        for o in range(n):
            cnt[o] = 0
            for r in range(lo[o], hi[o]):
                if y_exc[r] <= thr[o]:
                    cand[o, cnt[o]] = r
                    cnt[o] += 1
            if cnt[o] == 0:
                empty = True
        if empty:
            continue
        joins += 1
        order = np.argsort(cnt)
        for x in range(n):
            host_mask[x] = 0
        # depth-first choice of one itinerary per league-Y team
        level = 0
        pos[0] = -1
        acc[0] = 0.0
        while level >= 0:
            o = order[level]
            if pos[level] >= 0:
                r = cand[o, pos[level]]
                for x in range(n):
                    if is_fixed[x] < 0:
                        host_mask[x] &= ~(1 << y_visit[r, x])
            j = pos[level] + 1
            while j < cnt[o]:
                r = cand[o, j]
                if y_exc[r] + acc[level] + x_floor <= budget + eps:
                    clash = False
                    for x in range(n):
                        if is_fixed[x] < 0 and host_mask[x] >> y_visit[r, x] & 1:
                            clash = True
                            break
                    if not clash:
                        break
                j += 1
            if j == cnt[o]:
                pos[level] = -1
                level -= 1
                continue
            pos[level] = j
            r = cand[o, j]
            picks[o] = r
            for x in range(n):
                if is_fixed[x] < 0:
                    host_mask[x] |= 1 << y_visit[r, x]
            acc[level + 1] = acc[level] + y_exc[r]
            if level < n - 1:
                level += 1
                pos[level] = -1
                continue
            tuples += 1
            ok = True
            for x in range(n):
                jf = is_fixed[x]
                if jf >= 0:
                    pat_of[x] = pat_ids[sc, jf]
                    for oo in range(n):
                        host[x, oo] = host_rows[sc, jf, oo]
                else:
                    bits = 0
                    for oo in range(n):
                        host[x, oo] = y_visit[picks[oo], x]
                        bits |= 1 << host[x, oo]
                    pat_of[x] = pattern_index[full ^ bits]
                    if pat_of[x] < 0:
                        ok = False
            if ok:
                for oo in range(n):
                    mask = y_mask[picks[oo]]
                    for s in range(m):
                        y_home[oo, s] = not (mask >> s & 1)
                _complete(host, pat_of, y_home, x_tables, perms, slot_tab, x_thr, budget + eps, acc[n], out_rows, out_tot)
    rows = np.array(out_rows, dtype=np.int64).reshape(-1, 2 * n + n * n)
    return rows, np.array(out_tot), joins, tuples


class _Search:
    """All schedules with total excess at most ``budget`` for one instance."""

    def __init__(self, inst: Instance, budget, prune=True, fixed=None, tables=None, progress=None):
        n = inst.n
        if not 2 <= n <= 6:
            raise CapacityError("the exact solver handles 2 <= n <= 6")
        self.inst, self.n, self.m = inst, n, 2 * n
        self.budget = budget
        self.prune = prune
        self.progress = progress
        self.eps = 0.0 if inst.is_integral else 1e-7
        self.tables = tables or {t: excess_table(t, inst) for t in range(2 * n)}
        self.spaces = {t: _space_from_table(t, n, self.tables[t], budget) for t in range(2 * n)}
        self.patterns = away_patterns(n)
        self.pattern_index = {mask: i for i, mask in enumerate(self.patterns)}
        self.perm_index = {tuple(p): i for i, p in enumerate(_perms(n).tolist())}
        self.fixed = list(fixed) if fixed is not None else self._choose_fixed()
        self.stats = SearchStats(budget, tuple(self.fixed))
        self.results = []

    # team selection ------------------------------------------------
    def _choose_fixed(self) -> list:
        n = self.n
        k = min(4, n - 1) if n > 2 else 1
        order = sorted(range(n), key=lambda x: (len(self.spaces[x]), x))
        chosen = order[:k]
        if k >= 2 and self.prune:
            scr = prop2_screen(self.inst, self.budget, spaces=self.spaces) if n == 6 else None
            if scr is not None and scr.pair is not None and not any("three-game" in f or "no itinerary" in f for f in scr.failures):
                a, b = scr.pair
                rest = [x for x in order if x not in (a, b)][: k - 2]
                chosen = [a, b] + rest
        return chosen

    # pipeline ------------------------------------------------------
    def run(self):
        import time

        t0 = time.perf_counter()
        n, m, M = self.n, self.m, self.budget
        if any(len(sp) == 0 for sp in self.spaces.values()):
            self.stats.seconds = time.perf_counter() - t0
            return self.results
        ys = list(range(n, 2 * n))
        spaces_y = [self.spaces[y] for y in ys]
        lb = _lower_bounds(self.spaces)
        pat_bound = {x: self.tables[x].min(1) for x in range(n)}
        tabs = _bound_tables(spaces_y, self.fixed, m)
        free_lb = sum(lb[x] for x in range(n) if x not in self.fixed)
        keys = np.zeros((1, n), dtype=np.int64)
        spent = np.zeros(1)
        pat_ids = np.zeros((1, 0), dtype=np.int64)
        prev_hosts = np.zeros((1, 0, n), dtype=np.int64)
        for level, x in enumerate(self.fixed):
            pids = np.flatnonzero(pat_bound[x] <= M + self.eps)
            home_lookup = np.full(1 << m, -1, dtype=np.int64)
            for row, q in enumerate(pids):
                home_lookup[((1 << m) - 1) ^ self.patterns[q]] = row
            partial_ok = np.zeros(1 << m, dtype=np.bool_)
            for full in np.flatnonzero(home_lookup >= 0):
                sub = int(full)
                while True:
                    partial_ok[sub] = True
                    if sub == 0:
                        break
                    sub = (sub - 1) & full
            pb = pat_bound[x][pids].astype(np.float64)
            tab = np.stack(tabs[level])
            if self.prune:
                slack = M + self.eps - free_lb - sum(lb[x2] for x2 in self.fixed[level + 1:])
            else:
                # only drop host orders that no league-Y itinerary can meet
                tab = np.where(tab < INF, 0.0, np.inf)
                slack = np.inf
            par, qi, hosts = _extend(keys, spent, prev_hosts, home_lookup, partial_ok, pb, tab, m, float(slack))
            keys = keys[par] * m + hosts
            spent = spent[par] + pb[qi]
            pat_ids = np.concatenate([pat_ids[par], pids[qi][:, None]], 1)
            prev_hosts = np.concatenate([prev_hosts[par], hosts[:, None, :]], 1)
            self._report(f"level {level + 1}: {len(keys)} partial scenarios")
        self.stats.scenarios = len(keys)
        self._join_all(pat_ids, prev_hosts, lb, pat_bound)
        self.stats.found = len(self.results)
        self.stats.seconds = time.perf_counter() - t0
        return self.results

    def _join_all(self, pat_ids, prev_hosts, lb, pat_bound, chunk=5000):
        n, m = self.n, self.m
        seg, keys, exc, visit, masks = [0], [], [], [], []
        for y in range(n, 2 * n):
            sp = self.spaces[y]
            key = np.zeros(len(sp), dtype=np.int64)
            for x in self.fixed:
                key = key * m + sp.visit[:, x]
            order = np.argsort(key, kind="stable")
            keys.append(key[order])
            exc.append(sp.excess[order].astype(np.float64))
            visit.append(sp.visit[order].astype(np.int64))
            masks.append(np.array(sp.patterns, dtype=np.int64)[sp.pat[order]])
            seg.append(seg[-1] + len(sp))
        pattern_index = np.full(1 << m, -1, dtype=np.int64)
        pattern_index[list(self.patterns)] = np.arange(len(self.patterns))
        slot_tab = np.array([away_slots(mask, m) for mask in self.patterns], dtype=np.int64)
        x_tables = np.stack([self.tables[x].astype(np.float64) for x in range(n)])
        bound_rows = np.stack([np.asarray(pat_bound[x], dtype=np.float64) for x in range(n)])
        lb_x = np.array([float(lb[x]) for x in range(n)])
        args = (np.array(self.fixed, dtype=np.int64), np.array(seg, dtype=np.int64), np.concatenate(keys),
                np.concatenate(exc), np.concatenate(visit).reshape(-1, n), np.concatenate(masks), bound_rows, lb_x,
                x_tables, pattern_index, _perms(n).astype(np.int64), slot_tab)
        total = len(pat_ids)
        for start in range(0, total, chunk):
            stop = min(start + chunk, total)
            rows, tots, joins, tuples = _join(pat_ids[start:stop], prev_hosts[start:stop], *args,
                                              float(self.budget), float(self.eps), self.prune)
            self.stats.joins += joins
            self.stats.central_tuples += tuples
            for row, tot in zip(rows, tots):
                self._emit(row, tot)
            self._report(f"scenarios {stop}/{total}, found {len(self.results)}")

    def _report(self, text):
        if self.progress:
            self.progress(text)

    def _emit(self, row, total):
        n, m = self.n, self.m
        perms = _perms(n)
        pat_of = row[:n]
        chosen = np.empty(n, dtype=np.int64)
        for code in row[n:2 * n]:
            chosen[code % n] = code // n
        host = row[2 * n:].reshape(n, n)
        away_opp = np.zeros((n, m), dtype=np.int64)
        home_mask = np.zeros((n, m), dtype=bool)
        for x in range(n):
            for o in range(n):
                away_opp[x, host[x, o]] = n + o
                home_mask[x, host[x, o]] = True
            slots = away_slots(self.patterns[pat_of[x]], m)
            for k, s in enumerate(slots):
                away_opp[x, s] = n + perms[chosen[x]][k]
        sched = Schedule.from_away_rows(n, away_opp, home_mask)
        value = int(round(total)) if self.inst.is_integral else float(total)
        self.results.append((value, sched))


def search(inst: Instance, budget, prune: bool = True, fixed=None, progress=None):
    """Every feasible schedule with total excess at most ``budget``.

    Returns ``(schedules, stats)`` where schedules are ``(excess, Schedule)``.
    With ``prune`` off, the bound-based filters are skipped; the result is
    the same, only slower.
    """
    s = _Search(inst, budget, prune=prune, fixed=fixed, progress=progress)
    return s.run(), s.stats


def canonical_pairs(schedules) -> list:
    """One schedule per schedule/reversal pair (the lexicographically smaller key)."""
    seen, out = set(), []
    for s in schedules:
        rev = s.reversed()
        key = min(s.key(), rev.key())
        if key not in seen:
            seen.add(key)
            out.append(s if s.key() == key else rev)
    return out


def deepening_budgets(ilb_total, cap=None, ratio: float = 1.25):
    """Budgets 0, b1, b2, ... growing by ``ratio`` from ilb_total / 1000."""
    first = float(ilb_total) / 1000.0
    out = [0]
    cur = first
    while cap is None or cur < cap:
        out.append(cur)
        if len(out) > 200:
            break
        cur *= ratio
    if cap is not None:
        out.append(cap)
    return out


def solve_exact(inst: Instance, bound=None, prune: bool = True, fixed=None, progress=None, ratio: float = 1.25) -> SolveResult:
    """Least-travel schedule by budgeted search.

    With ``bound`` given, a single search returns every schedule with excess
    at most ``bound``.  Otherwise budgets grow from zero (capped by the
    excess of the uniform construction when one exists) until a search
    succeeds; that search lists every optimum.
    """
    from .bounds import all_ilb
    from .uniform import construct
    from .model import total_travel

    if inst.n > 6:
        raise CapacityError("the exact solver handles n <= 6")
    integral = inst.is_integral
    ilb_total = sum(all_ilb(inst))
    if bound is not None:
        budgets = [bound]
    else:
        cap = None
        try:
            _, sched = construct(inst)
            cap = total_travel(sched, inst).total_distance - ilb_total
        except (ValueError, RuntimeError):
            cap = None
        budgets = deepening_budgets(ilb_total, cap, ratio)
    if integral:
        budgets = sorted({int(np.floor(b + 1e-9)) for b in budgets})
    tables = {t: excess_table(t, inst) for t in range(2 * inst.n)}
    stats = []
    found = []
    used = None
    for b in budgets:
        if progress:
            progress(f"budget {b}")
        s = _Search(inst, b, prune=prune, fixed=fixed, tables=tables, progress=progress)
        found = s.run()
        stats.append(s.stats)
        used = b
        if found:
            break
    if not found:
        return SolveResult(None, None, ilb_total, [], [], used, stats)
    best = min(v for v, _ in found)
    tol = 0 if integral else 1e-7
    opt = [sch for v, sch in found if v <= best + tol]
    opt.sort(key=lambda s: s.key())
    total = ilb_total + best
    return SolveResult(total, best, ilb_total, opt, canonical_pairs(opt), used, stats)
