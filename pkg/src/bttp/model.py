"""Core data model: instances, schedules, itineraries and travel accounting.

Teams are indexed ``0 .. 2n-1``; league X holds the first ``n`` indices and
league Y the remaining ``n``.  A schedule stores, for every team and slot,
the opponent index and whether the game is played at home.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DIST_TOL = 1e-9


class Venue(enum.Enum):
    HOME = "H"
    AWAY = "A"


class CapacityError(ValueError):
    """Raised when an exhaustive routine is asked for an instance too large."""


@dataclass(frozen=True, eq=False)
class Instance:
    n: int
    team_names: tuple[str, ...]
    dist: np.ndarray
    coords: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        dist = np.asarray(self.dist)
        if dist.dtype.kind not in "iuf":
            raise ValueError("distance matrix must be numeric")
        if self.n < 2:
            raise ValueError("need at least two teams per league")
        m = 2 * self.n
        if len(self.team_names) != m or dist.shape != (m, m):
            raise ValueError(f"expected {m} teams and a {m}x{m} matrix")
        if np.any(dist < 0):
            raise ValueError("distances must be nonnegative")
        if np.any(np.diag(dist) != 0):
            raise ValueError("diagonal of the distance matrix must be zero")
        if not np.allclose(dist, dist.T, rtol=0, atol=DIST_TOL):
            raise ValueError("distance matrix must be symmetric")
        if self.coords is not None:
            if len(self.coords) != m:
                raise ValueError("one coordinate pair per team required")
            pts = np.asarray(self.coords, dtype=float)
            euclid = np.hypot(*(pts[:, None, :] - pts[None, :, :]).transpose(2, 0, 1))
            if not np.allclose(dist, euclid, rtol=0, atol=DIST_TOL):
                raise ValueError("distances disagree with coordinates")
        dist = dist.copy()
        dist.setflags(write=False)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "team_names", tuple(self.team_names))

    @classmethod
    def from_coords(cls, x_points: Sequence, y_points: Sequence, names=None) -> "Instance":
        pts = [tuple(map(float, p)) for p in list(x_points) + list(y_points)]
        n = len(x_points)
        if len(y_points) != n:
            raise ValueError("leagues must have equal size")
        if names is None:
            names = [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(n)]
        arr = np.asarray(pts)
        diff = arr[:, None, :] - arr[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        return cls(n, tuple(names), dist, tuple(pts))

    @property
    def size(self) -> int:
        return 2 * self.n

    @property
    def is_integral(self) -> bool:
        return self.dist.dtype.kind in "iu"

    def league(self, team: int) -> str:
        return "X" if team < self.n else "Y"

    def league_teams(self, league: str) -> range:
        if league == "X":
            return range(self.n)
        if league == "Y":
            return range(self.n, 2 * self.n)
        raise ValueError(f"unknown league {league!r}")

    def opponents(self, team: int) -> range:
        return self.league_teams("Y" if team < self.n else "X")

    def index(self, name: str) -> int:
        try:
            return self.team_names.index(name)
        except ValueError:
            raise KeyError(f"unknown team {name!r}") from None

    def scaled(self, factor) -> "Instance":
        return Instance(self.n, self.team_names, self.dist * factor)


@dataclass(frozen=True)
class TeamItinerary:
    """One team's row of a schedule: ``(opponent, venue)`` per slot."""

    team: int
    opponents: tuple[int, ...]
    venues: tuple[Venue, ...]

    def __post_init__(self):
        if len(self.opponents) != len(self.venues):
            raise ValueError("opponent and venue rows differ in length")

    def __len__(self):
        return len(self.opponents)

    @property
    def away_mask(self) -> tuple[bool, ...]:
        return tuple(v is Venue.AWAY for v in self.venues)

    def locations(self) -> list[int]:
        """Venue owner for each slot (the team itself for home games)."""
        return [o if v is Venue.AWAY else self.team for o, v in zip(self.opponents, self.venues)]

    def reversed(self) -> "TeamItinerary":
        return TeamItinerary(self.team, self.opponents[::-1], self.venues[::-1])

    @classmethod
    def from_cells(cls, team: int, cells: Iterable[tuple[int, str | Venue]]) -> "TeamItinerary":
        opps, venues = [], []
        for opp, v in cells:
            opps.append(int(opp))
            venues.append(v if isinstance(v, Venue) else Venue(v))
        return cls(team, tuple(opps), tuple(venues))


@dataclass(frozen=True, eq=False)
class Schedule:
    """Full ``2n x 2n`` double round-robin table.

    ``opp[t, s]`` is the opponent of team ``t`` in slot ``s`` and
    ``home[t, s]`` is true when that game is at ``t``'s venue.
    """

    n: int
    opp: np.ndarray
    home: np.ndarray

    def __post_init__(self):
        opp = np.asarray(self.opp, dtype=np.int64)
        home = np.asarray(self.home, dtype=bool)
        m = 2 * self.n
        if opp.shape != (m, m) or home.shape != (m, m):
            raise ValueError(f"schedule grid must be {m}x{m}")
        if opp.min() < 0 or opp.max() >= m:
            raise ValueError("opponent index out of range")
        opp.setflags(write=False)
        home.setflags(write=False)
        object.__setattr__(self, "opp", opp)
        object.__setattr__(self, "home", home)

    @property
    def slot_count(self) -> int:
        return 2 * self.n

    def itinerary(self, team: int) -> TeamItinerary:
        venues = tuple(Venue.HOME if h else Venue.AWAY for h in self.home[team])
        return TeamItinerary(team, tuple(int(o) for o in self.opp[team]), venues)

    def itineraries(self) -> list[TeamItinerary]:
        return [self.itinerary(t) for t in range(2 * self.n)]

    def reversed(self) -> "Schedule":
        return Schedule(self.n, self.opp[:, ::-1], self.home[:, ::-1])

    def key(self) -> bytes:
        return self.opp.tobytes() + self.home.tobytes()

    def __eq__(self, other):
        if not isinstance(other, Schedule):
            return NotImplemented
        return self.n == other.n and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    @classmethod
    def from_away_rows(cls, n: int, away_opp: np.ndarray, home_mask: np.ndarray) -> "Schedule":
        """Build the full grid from the league-X rows alone.

        ``away_opp[x, s]`` is x's opponent and ``home_mask[x, s]`` whether x
        hosts; league Y rows follow by complementarity.
        """
        m = 2 * n
        opp = np.zeros((m, m), dtype=np.int64)
        home = np.zeros((m, m), dtype=bool)
        opp[:n] = away_opp
        home[:n] = home_mask
        for x in range(n):
            for s in range(m):
                y = int(away_opp[x, s])
                opp[y, s] = x
                home[y, s] = not home_mask[x, s]
        return cls(n, opp, home)


@dataclass(frozen=True)
class TravelReport:
    distances: tuple
    trips: tuple[int, ...]

    @property
    def total_distance(self):
        return sum(self.distances)

    @property
    def total_trips(self) -> int:
        return sum(self.trips)

    def league_distance(self, n: int, league: str):
        part = self.distances[:n] if league == "X" else self.distances[n:]
        return sum(part)


def _as_number(value, integral: bool):
    return int(value) if integral else float(value)


def team_travel_distance(itinerary: TeamItinerary, inst: Instance):
    """Closed-walk length of one team: start at home, end at home."""
    d = inst.dist
    here = itinerary.team
    total = 0
    for loc in itinerary.locations():
        total += d[here, loc]
        here = loc
    total += d[here, itinerary.team]
    return _as_number(total, inst.is_integral)


def count_trips(itinerary: TeamItinerary) -> int:
    """Number of venue changes, including leaving home and the final return."""
    here = itinerary.team
    trips = 0
    for loc in itinerary.locations():
        if loc != here:
            trips += 1
        here = loc
    return trips + (here != itinerary.team)


def total_travel(sched: Schedule, inst: Instance) -> TravelReport:
    if sched.n != inst.n:
        raise ValueError(f"schedule has n={sched.n} but instance has n={inst.n}")
    its = sched.itineraries()
    return TravelReport(
        tuple(team_travel_distance(it, inst) for it in its),
        tuple(count_trips(it) for it in its),
    )


def trip_cost(dist: np.ndarray, home: int, stops: Sequence[int]):
    """Cost of leaving ``home``, visiting ``stops`` in order and returning."""
    if not stops:
        return 0
    cost = dist[home, stops[0]] + dist[stops[-1], home]
    for a, b in zip(stops, stops[1:]):
        cost += dist[a, b]
    return cost


def distances_close(a, b, tol: float = DIST_TOL) -> bool:
    return math.isclose(float(a), float(b), rel_tol=0.0, abs_tol=tol)
