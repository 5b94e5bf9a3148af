"""3-SAT to BTTP reduction and small-scale oracles for it.

A balanced 3-CNF formula with ``m = 2k`` clauses becomes an instance with
``18k`` league-X teams placed on the vertices of a gadget graph and ``6k``
league-Y teams at each of three points ``p``, ``q`` and ``r``.  The formula is
satisfiable exactly when the cheapest p-rooted cover of the X vertices by
cycles of length at most four weighs ``k(24z^2 + 3z)`` with ``z = 20k + 1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from .model import CapacityError, Instance

MAX_COVER_VERTICES = 20


class CnfError(ValueError):
    pass


@dataclass(frozen=True)
class CnfFormula:
    """Clauses are tuples of nonzero ints: ``+i`` is u_i, ``-i`` its negation (1-based)."""

    num_vars: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        for cl in self.clauses:
            if len(cl) != 3:
                raise CnfError(f"clause {cl} does not have three literals")
            for lit in cl:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise CnfError(f"literal {lit} out of range")

    def occurrences(self, var: int) -> tuple[int, int]:
        pos = sum(1 for cl in self.clauses for lit in cl if lit == var)
        neg = sum(1 for cl in self.clauses for lit in cl if lit == -var)
        return pos, neg

    @property
    def balanced(self) -> bool:
        return all(p == q for p, q in map(self.occurrences, range(1, self.num_vars + 1)))

    def evaluate(self, assignment) -> bool:
        """``assignment[i - 1]`` is the truth value of u_i."""
        return all(any((lit > 0) == bool(assignment[abs(lit) - 1]) for lit in cl) for cl in self.clauses)


def parse_dimacs(text: str) -> CnfFormula:
    num_vars = None
    lits: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith(("c", "%")):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise CnfError(f"bad header: {line!r}")
            num_vars = int(parts[2])
            continue
        try:
            lits.extend(int(tok) for tok in line.split())
        except ValueError as exc:
            raise CnfError(f"bad clause line: {line!r}") from exc
    if num_vars is None:
        raise CnfError("missing 'p cnf' header")
    clauses, cur = [], []
    for lit in lits:
        if lit == 0:
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(lit)
    if cur:
        raise CnfError("last clause is not terminated by 0")
    return CnfFormula(num_vars, tuple(clauses))


def read_dimacs(path) -> CnfFormula:
    return parse_dimacs(Path(path).read_text())


def to_dimacs(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.num_vars} {len(formula.clauses)}"]
    lines += [" ".join(map(str, cl)) + " 0" for cl in formula.clauses]
    return "\n".join(lines) + "\n"


def brute_force_sat(formula: CnfFormula):
    """First satisfying assignment in truth-table order, or None."""
    for bits in itertools.product((False, True), repeat=formula.num_vars):
        if formula.evaluate(bits):
            return bits
    return None


def balance(formula: CnfFormula) -> CnfFormula:
    """Pad with tautologies (w v x v not-x) until every variable is balanced.

    For each variable the rarer polarity ``w`` is topped up using ``x`` the next
    variable cyclically.  Balanced formulas always have an even clause count.
    """
    l = formula.num_vars
    clauses = list(formula.clauses)
    for i in range(1, l + 1):
        nxt = i % l + 1
        pos, neg = CnfFormula(l, tuple(clauses)).occurrences(i)
        while pos != neg:
            lit = i if pos < neg else -i
            clauses.append((lit, nxt, -nxt))
            pos, neg = CnfFormula(l, tuple(clauses)).occurrences(i)
    return CnfFormula(l, tuple(clauses))


# ------------------------------------------------------------------ gadgets


@dataclass
class GadgetGraph:
    k: int
    labels: list[str]
    kinds: list[str]  # one of A B C D E F U
    edges: set = field(default_factory=set)
    literal: dict = field(default_factory=dict)  # U vertex -> (var, positive, occurrence)

    def add_edge(self, a, b):
        self.edges.add((min(a, b), max(a, b)))

    def adjacent(self, a, b) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def neighbours(self, v):
        return [b if a == v else a for a, b in self.edges if v in (a, b)]

    def of_kind(self, kind):
        return [v for v, t in enumerate(self.kinds) if t == kind]


def build_gadget_graph(formula: CnfFormula) -> GadgetGraph:
    if not formula.balanced:
        raise CnfError("formula must be balanced first")
    k = len(formula.clauses) // 2
    labels, kinds = [], []

    def vertex(label, kind):
        labels.append(label)
        kinds.append(kind)
        return len(labels) - 1

    g = GadgetGraph(k, labels, kinds)
    occ_vertex = {}  # (var, positive, r) -> vertex
    a_v, b_v = {}, {}
    for i in range(1, formula.num_vars + 1):
        r_i = formula.occurrences(i)[0]
        for r in range(1, r_i + 1):
            a_v[i, r] = vertex(f"a[{i},{r}]", "A")
        for r in range(1, r_i + 1):
            b_v[i, r] = vertex(f"b[{i},{r}]", "B")
        for r in range(1, r_i + 1):
            occ_vertex[i, True, r] = vertex(f"u[{i},{r}]", "U")
            g.literal[occ_vertex[i, True, r]] = (i, True, r)
        for r in range(1, r_i + 1):
            occ_vertex[i, False, r] = vertex(f"ubar[{i},{r}]", "U")
            g.literal[occ_vertex[i, False, r]] = (i, False, r)
        for r in range(1, r_i + 1):
            prev = r - 1 if r > 1 else r_i
            g.add_edge(a_v[i, r], occ_vertex[i, False, prev])
            g.add_edge(a_v[i, r], occ_vertex[i, True, r])
            g.add_edge(b_v[i, r], occ_vertex[i, True, r])
            g.add_edge(b_v[i, r], occ_vertex[i, False, r])
    c_v = [vertex(f"c[{j}]", "C") for j in range(1, 2 * k + 1)]
    d_v = [vertex(f"d[{j}]", "D") for j in range(1, 2 * k + 1)]
    seen: dict = {}
    for j, cl in enumerate(formula.clauses):
        g.add_edge(c_v[j], d_v[j])
        for lit in cl:
            key = (abs(lit), lit > 0)
            seen[key] = seen.get(key, 0) + 1
            g.add_edge(c_v[j], occ_vertex[key + (seen[key],)])
    for i in range(1, k + 1):
        vertex(f"e[{i}]", "E")
    for i in range(1, k + 1):
        vertex(f"f[{i}]", "F")
    return g


# inter-league weights by vertex kind, columns p, q, r; entries name a weight
_TABLE = {
    "A": ("z2", "z2+z", "2z2-1"),
    "B": ("z2", "2z2-1", "z2+z"),
    "C": ("2z2-1", "z2", "z2+z"),
    "D": ("z2", "2z2-1", "z2"),
    "E": ("2z2-1", "z2+z", "z2"),
    "F": ("z2", "z2", "2z2-1"),
    "U": ("z2+z", "z2+2z", "z2+2z"),
}
ROOTS = ("p", "q", "r")


def weight_values(z: int) -> dict:
    return {"z2": z * z, "z2+z": z * z + z, "z2+2z": z * z + 2 * z, "2z2-1": 2 * z * z - 1}


def target_total(k: int) -> int:
    return 96 * k * k * (2900 * k * k + 375 * k + 11)


def root_ilb(root: str, k: int) -> int:
    z = 20 * k + 1
    extra = {"p": 3, "q": 20, "r": 19}[root]
    return k * (24 * z * z + extra * z)


@dataclass(frozen=True)
class ReducedInstance:
    k: int
    z: int
    formula: CnfFormula
    graph: GadgetGraph
    instance: Instance
    x_weights: np.ndarray  # 18k x 18k intra-X weights
    root_weights: np.ndarray  # 18k x 3, columns p, q, r

    @property
    def target(self) -> int:
        return target_total(self.k)

    def root_teams(self, root: str) -> list[int]:
        n = self.instance.n
        base = n + ROOTS.index(root) * 6 * self.k
        return list(range(base, base + 6 * self.k))


def _intra_weights(g: GadgetGraph, z: int) -> np.ndarray:
    w = weight_values(z)
    size = len(g.labels)
    mat = np.full((size, size), w["2z2-1"], dtype=np.int64)
    np.fill_diagonal(mat, 0)

    def put(a, b, val):
        mat[a, b] = mat[b, a] = val

    U, E, F = g.of_kind("U"), g.of_kind("E"), g.of_kind("F")
    # second-tier edges first, gadget edges overwrite nothing they share
    for u in U:
        for f in F:
            put(u, f, w["z2+z"])
    for a in g.of_kind("A"):
        for b in g.of_kind("B"):
            if set(g.neighbours(a)) & set(g.neighbours(b)) & set(U):
                put(a, b, w["z2+z"])
    for d in g.of_kind("D"):
        cs = [c for c in g.neighbours(d) if g.kinds[c] == "C"]
        for c in cs:
            for u in g.neighbours(c):
                if g.kinds[u] == "U":
                    put(d, u, w["z2+z"])
    for a, b in g.edges:
        put(a, b, w["z2"])
    for u in U:
        for e in E:
            put(u, e, w["z2"])
    for e, f in zip(E, F):
        put(e, f, w["z2"])
    return mat


def build_reduction(formula: CnfFormula) -> ReducedInstance:
    """Weighted 36k-team instance for a balanced formula."""
    g = build_gadget_graph(formula)
    k = g.k
    if k == 0:
        raise CnfError("formula has no clauses")
    z = 20 * k + 1
    w = weight_values(z)
    xw = _intra_weights(g, z)
    rw = np.array([[w[key] for key in _TABLE[kind]] for kind in g.kinds], dtype=np.int64)
    n = 18 * k
    dist = np.zeros((2 * n, 2 * n), dtype=np.int64)
    dist[:n, :n] = xw
    for ri in range(3):
        cols = slice(n + ri * 6 * k, n + (ri + 1) * 6 * k)
        dist[:n, cols] = rw[:, [ri]]
        dist[cols, :n] = rw[:, [ri]].T
        for rj in range(3):
            if rj != ri:
                other = slice(n + rj * 6 * k, n + (rj + 1) * 6 * k)
                dist[cols, other] = w["2z2-1"]
    names = list(g.labels) + [f"{root}[{i}]" for root in ROOTS for i in range(6 * k)]
    inst = Instance(n, tuple(names), dist)
    return ReducedInstance(k, z, formula, g, inst, xw, rw)


def triangle_violations(dist: np.ndarray) -> int:
    """Number of ordered triples with d(a,c) > d(a,b) + d(b,c)."""
    d = np.asarray(dist)
    bad = d[:, None, :] > d[:, :, None] + d[None, :, :]
    return int(bad.sum())


# ------------------------------------------------------------ rooted covers


@dataclass(frozen=True)
class RootedCycleCover:
    root: str
    cycles: tuple[tuple[int, ...], ...]  # X vertices in visiting order
    weight: int
    census: tuple[int, int, int]


def _cycle_options(xw, rw_col, verts):
    """Cheapest order and weight of the root cycle through ``verts``."""
    best = None
    for order in itertools.permutations(verts):
        c = rw_col[order[0]] + rw_col[order[-1]]
        for a, b in zip(order, order[1:]):
            c += xw[a, b]
        if best is None or c < best[0]:
            best = (int(c), order)
    return best


@njit(cache=True)
def _push_dp(cost, m):
    # extend each partial cover by a cycle through its lowest uncovered vertex
    full = (1 << m) - 1
    best = np.full(full + 1, np.iinfo(np.int64).max)
    best[0] = 0
    for mask in range(full):
        base = best[mask]
        if base == np.iinfo(np.int64).max:
            continue
        free = full ^ mask
        low = free & -free
        rest = free ^ low
        cand = base + cost[low]
        if cand < best[mask | low]:
            best[mask | low] = cand
        r1 = rest
        while r1:
            a = r1 & -r1
            r1 ^= a
            t = mask | low | a
            cand = base + cost[low | a]
            if cand < best[t]:
                best[t] = cand
            r2 = r1
            while r2:
                b = r2 & -r2
                r2 ^= b
                t = mask | low | a | b
                cand = base + cost[low | a | b]
                if cand < best[t]:
                    best[t] = cand
    return best


def classify_cycle(g: GadgetGraph, root: str, cycle) -> str | None:
    """Which special type (``"aub"``, ``"ucd"``, ``"uef"``) a root cycle is, if any."""
    if len(cycle) != 3:
        return None
    for pattern, name in (("AUB", "aub"), ("UCD", "ucd"), ("UEF", "uef")):
        for seq in (cycle, cycle[::-1]):
            if "".join(g.kinds[v] for v in seq) != pattern:
                continue
            x, y, w = seq
            if name == "uef":
                if g.labels[y][1:] == g.labels[w][1:]:
                    return name
            elif g.adjacent(x, y) and g.adjacent(y, w):
                return name
    return None


def census_of(g: GadgetGraph, root: str, cycles) -> tuple[int, int, int]:
    kinds = [classify_cycle(g, root, c) for c in cycles]
    return kinds.count("aub"), kinds.count("ucd"), kinds.count("uef")


def min_rooted_cover(root: str, red: ReducedInstance) -> RootedCycleCover:
    """Exact minimum-weight cover of X by root cycles of length at most four."""
    m = len(red.graph.labels)
    if m > MAX_COVER_VERTICES:
        raise CapacityError(f"{m} vertices exceed the cover oracle capacity of {MAX_COVER_VERTICES}")
    col = red.root_weights[:, ROOTS.index(root)]
    big = np.iinfo(np.int64).max // 4
    cost = np.full(1 << m, big, dtype=np.int64)
    orders = {}
    for size in (1, 2, 3):
        for verts in itertools.combinations(range(m), size):
            mask = sum(1 << v for v in verts)
            c, order = _cycle_options(red.x_weights, col, verts)
            cost[mask] = c
            orders[mask] = order
    best = _push_dp(cost, m)
    # walk back from the full set; the last cycle added to a state always
    # holds the lowest vertex its parent state left uncovered
    cycles = []
    full = (1 << m) - 1
    mask = full
    while mask:
        bits = [1 << v for v in range(m) if mask >> v & 1]
        subs = [sum(c) for size in (1, 2, 3) for c in itertools.combinations(bits, size)]
        for sub in subs:
            parent = mask ^ sub
            free = full ^ parent
            if not (free & -free) & sub or best[parent] >= big:
                continue
            if best[parent] + cost[sub] == best[mask]:
                cycles.append(orders[sub])
                mask = parent
                break
        else:  # pragma: no cover - DP table inconsistent
            raise RuntimeError("cover reconstruction failed")
    cycles = tuple(cycles)
    return RootedCycleCover(root, cycles, int(best[-1]), census_of(red.graph, root, cycles))


def cover_weight(red: ReducedInstance, root: str, cycles) -> int:
    col = red.root_weights[:, ROOTS.index(root)]
    total = 0
    for cyc in cycles:
        total += int(col[cyc[0]] + col[cyc[-1]])
        total += sum(int(red.x_weights[a, b]) for a, b in zip(cyc, cyc[1:]))
    return total


class DecodeError(ValueError):
    pass


def decode_assignment(cover: RootedCycleCover, red: ReducedInstance):
    """Truth assignment read off a p-rooted cover with census (3k, 2k, k).

    A variable is false when its positive-occurrence vertices sit in the
    a-u-b cycles and true when the negated ones do.
    """
    k = red.k
    if cover.root != "p" or cover.census != (3 * k, 2 * k, k):
        raise DecodeError(f"cover census {cover.census} is not {(3 * k, 2 * k, k)}")
    g = red.graph
    in_aub = {}
    for cyc in cover.cycles:
        if classify_cycle(g, "p", cyc) == "aub":
            u = next(v for v in cyc if g.kinds[v] == "U")
            var, positive, _ = g.literal[u]
            in_aub.setdefault(var, set()).add(positive)
    values = []
    for var in range(1, red.formula.num_vars + 1):
        sides = in_aub.get(var, set())
        if len(sides) > 1:
            raise DecodeError(f"variable {var} has both polarities in a-u-b cycles")
        values.append(sides != {True})
    if not red.formula.evaluate(values):
        raise DecodeError("decoded assignment does not satisfy the formula")
    return tuple(values)


def special_covers(red: ReducedInstance):
    """Yield every p-rooted cover built only from the three special cycle types.

    A-U-B cycles are chosen by backtracking over the A vertices; the C-D pairs
    are then matched to leftover U vertices adjacent to their C vertex, and the
    last k leftovers join the E-F pairs.  One cover is yielded per a-u-b choice
    that admits a matching.
    """
    g = red.graph
    A, B, C, D, E, F = (g.of_kind(t) for t in "ABCDEF")
    U = set(g.of_kind("U"))
    chosen: list = []
    used: set = set()

    def match_clauses(free_u):
        owner: dict = {}

        def augment(c, seen):
            for u in g.neighbours(c):
                if u in free_u and u not in seen:
                    seen.add(u)
                    if u not in owner or augment(owner[u], seen):
                        owner[u] = c
                        return True
            return False

        for c in C:
            if not augment(c, set()):
                return None
        return {c: u for u, c in owner.items()}

    def rec(idx):
        if idx == len(A):
            if used & set(B) != set(B):
                return
            free_u = U - used
            pairing = match_clauses(free_u)
            if pairing is None:
                return
            d_of = {c: next(d for d in g.neighbours(c) if g.kinds[d] == "D") for c in C}
            cycles = list(chosen) + [(pairing[c], c, d_of[c]) for c in C]
            rest = sorted(free_u - set(pairing.values()))
            cycles += [(u, e, f) for u, e, f in zip(rest, E, F)]
            yield tuple(cycles)
            return
        a = A[idx]
        for u in g.neighbours(a):
            if g.kinds[u] != "U" or u in used:
                continue
            for b in g.neighbours(u):
                if g.kinds[b] != "B" or b in used:
                    continue
                used.update((u, b))
                chosen.append((a, u, b))
                yield from rec(idx + 1)
                chosen.pop()
                used.difference_update((u, b))

    for cycles in rec(0):
        yield RootedCycleCover("p", cycles, cover_weight(red, "p", cycles), census_of(g, "p", cycles))


@dataclass(frozen=True)
class Decision:
    satisfiable: bool
    cover: RootedCycleCover | None
    assignment: tuple | None


def decide_sat_via_bttp(formula: CnfFormula) -> Decision:
    """Decide a formula through the p-rooted cover of its reduction.

    With 18 or fewer X vertices (one clause pair) the exact subset DP is used.
    Larger reductions fall back to a search restricted to covers made of the
    special cycle types, which exist exactly when the bound is reachable.
    """
    bal = formula if formula.balanced else balance(formula)
    if len(bal.clauses) == 0:
        raise CnfError("empty formula")
    red = build_reduction(bal)
    target = root_ilb("p", red.k)
    if len(red.graph.labels) <= MAX_COVER_VERTICES:
        cover = min_rooted_cover("p", red)
    else:
        # too large for the subset DP: look for a cover of special cycles only
        cover = next(special_covers(red), None)
        if cover is not None and cover.weight != target:
            raise RuntimeError("special cover does not reach the p-rooted bound")
    sat = cover is not None and cover.weight == target
    assignment = decode_assignment(cover, red) if sat else None
    return Decision(sat, cover, assignment)


def cover_triples_for_schedule(cover: RootedCycleCover, red: ReducedInstance):
    """Cover cycles ordered (a,u,b) cycles, (u,c,d), (u,e,f), as the p-teams visit them."""
    g = red.graph
    buckets = {"aub": [], "ucd": [], "uef": []}
    shape = {"aub": "AUB", "ucd": "UCD", "uef": "UEF"}
    for cyc in cover.cycles:
        kind = classify_cycle(g, "p", cyc)
        if kind is None:
            raise DecodeError("cover contains a cycle of no special type")
        seq = cyc if "".join(g.kinds[v] for v in cyc) == shape[kind] else cyc[::-1]
        buckets[kind].append(tuple(seq))
    return [t for key in ("aub", "ucd", "uef") for t in sorted(buckets[key])]


def reduction_schedule(red: ReducedInstance, cover: RootedCycleCover | None = None):
    """Uniform schedule of total ``T(k)`` built from a satisfying p-rooted cover."""
    from .uniform import lemma4_assemble

    if cover is None:
        cover = min_rooted_cover("p", red)
    triples = cover_triples_for_schedule(cover, red)
    return lemma4_assemble(
        red.k,
        triples,
        list(range(red.instance.n)),
        red.root_teams("p"),
        red.root_teams("q"),
        red.root_teams("r"),
        red.instance,
    )
