"""Monte Carlo study of how many trips distance-optimal n = 3 schedules take.

Each trial drops six random points in a region, scores all 30720 feasible
schedules at once and records the trip count of the optimum.  Trials are
split into fixed-size chunks, each seeded from its own child of the master
seed, so results do not depend on the number of workers.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .enumerate import schedule_table

CHUNK = 500
TRIP_FLOOR = 24
TOP_BUCKET = 28  # reported as "28+"


@dataclass(frozen=True)
class Region:
    kind: str  # "rect" or "disk"
    width: float = 1.0
    height: float = 1.0

    @classmethod
    def parse(cls, text: str) -> "Region":
        text = text.strip().lower()
        if text in ("unit-square", "square"):
            return cls("rect")
        if text in ("disk", "unit-disk"):
            return cls("disk")
        if "x" in text:
            w, h = (float(v) for v in text.split("x", 1))
            if w <= 0 or h <= 0:
                raise ValueError("rectangle sides must be positive")
            return cls("rect", w, h)
        raise ValueError(f"unknown region {text!r}")

    def __str__(self):
        if self.kind == "disk":
            return "disk"
        if self.width == self.height == 1.0:
            return "unit-square"
        return f"{self.width:g}x{self.height:g}"

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """``count`` trials of six points, shape (count, 6, 2)."""
        if self.kind == "disk":
            r = np.sqrt(rng.random((count, 6)))
            t = rng.random((count, 6)) * 2 * np.pi
            return np.stack([r * np.cos(t), r * np.sin(t)], -1)
        u = rng.random((count, 6, 2))
        return u * np.array([self.width, self.height])


@dataclass
class TripHistogram:
    trials: int
    seed: int
    region: str
    counts: dict = field(default_factory=dict)  # trip value (or "28+") -> trials
    ties: int = 0
    exact_ties: int = 0
    min_trips: int | None = None
    max_trips: int | None = None

    @property
    def fractions(self) -> dict:
        out = {k: v / self.trials for k, v in self.counts.items()}
        out["tie"] = self.ties / self.trials
        return out

    def to_json(self) -> str:
        doc = {
            "trials": self.trials,
            "seed": self.seed,
            "region": self.region,
            "counts": {str(k): v for k, v in self.counts.items()},
            "ties": self.ties,
            "exact_ties": self.exact_ties,
            "min_trips": self.min_trips,
            "max_trips": self.max_trips,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        lines = [f"# trials={self.trials} seed={self.seed} region={self.region}", "trips  count  fraction"]
        for key, v in self.counts.items():
            lines.append(f"{str(key):>5}  {v:>5}  {v / self.trials:.5f}")
        lines.append(f"{'tie':>5}  {self.ties:>5}  {self.ties / self.trials:.5f}")
        lines.append(f"# ties under exact comparison: {self.exact_ties}")
        return "\n".join(lines)


@lru_cache(maxsize=1)
def _leg_rows():
    table = schedule_table(3)
    rows = np.unique(table.legs, axis=0)
    return rows, rows.sum(1).astype(int)


def pair_distances(points: np.ndarray) -> np.ndarray:
    """Upper-triangle pair distances for a batch of six-point layouts."""
    iu = np.triu_indices(6, 1)
    diff = points[:, iu[0], :] - points[:, iu[1], :]
    return np.hypot(diff[..., 0], diff[..., 1])


def classify(totals: np.ndarray, trips: np.ndarray, decimals: int | None = 2, tol: float = 1e-9):
    """Trip count of the optimum for each column of ``totals``.

    Returns ``(trip_counts, tie_flags)``.  With ``decimals`` set, totals are
    rounded before comparison; otherwise values within ``tol`` tie.  A tie
    means optima with different trip counts; the smallest count is reported.
    """
    if decimals is not None:
        vals = np.round(totals, decimals)
        best = vals.min(0)
        hit = vals == best
    else:
        best = totals.min(0)
        hit = totals <= best + tol
    big = np.iinfo(np.int64).max
    lo = np.where(hit, trips[:, None], big).min(0)
    hi = np.where(hit, trips[:, None], -1).max(0)
    return lo, lo != hi


def trial_outcomes(points: np.ndarray, decimals: int | None = 2):
    rows, trips = _leg_rows()
    totals = rows @ pair_distances(points).T
    return classify(totals, trips, decimals)


def _run_chunk(args):
    seed, index, count, region = args
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    pts = region.sample(rng, count)
    trips, tie = trial_outcomes(pts, 2)
    _, exact_tie = trial_outcomes(pts, None)
    return trips, tie, exact_tie


def run_simulation(trials: int, seed: int = 0, region: Region | str = "unit-square", jobs: int = 1) -> TripHistogram:
    if trials < 1:
        raise ValueError("trials must be positive")
    if isinstance(region, str):
        region = Region.parse(region)
    work = [(seed, i, min(CHUNK, trials - start), region) for i, start in enumerate(range(0, trials, CHUNK))]
    if jobs > 1:
        _leg_rows()
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_run_chunk, work))
    else:
        parts = [_run_chunk(w) for w in work]
    trips = np.concatenate([p[0] for p in parts])
    tie = np.concatenate([p[1] for p in parts])
    exact_tie = np.concatenate([p[2] for p in parts])
    hist = TripHistogram(trials, seed, str(region))
    clean = trips[~tie]
    for t in range(TRIP_FLOOR, TOP_BUCKET):
        hist.counts[t] = int((clean == t).sum())
    hist.counts[f"{TOP_BUCKET}+"] = int((clean >= TOP_BUCKET).sum())
    below = int((clean < TRIP_FLOOR).sum())
    if below:
        hist.counts[f"<{TRIP_FLOOR}"] = below
    hist.ties = int(tie.sum())
    hist.exact_ties = int(exact_tie.sum())
    hist.min_trips = int(trips.min())
    hist.max_trips = int(trips.max())
    return hist
