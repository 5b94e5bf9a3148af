"""Bundled fixtures: distance matrices, published schedules and a CNF file.

Every file is pinned by its SHA-256 digest so tests run on byte-exact data.
Schedule fixtures are parsed against their paired instance.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from importlib import resources

from .formats import instance_from_text, schedule_from_text
from .model import Instance, Schedule


class FixtureError(ValueError):
    pass


@dataclass(frozen=True)
class Fixture:
    id: str
    kind: str  # "instance", "schedule" or "cnf"
    filename: str
    sha256: str
    note: str
    instance: str | None = None  # paired instance id for schedules


_FIXTURES = (
    Fixture("npb", "instance", "npb.json",
            "acd1aee46b12e855a9242b82e14830d51a6fa27551d46ee8a58bc23246c91653",
            "Japanese professional baseball, 12 teams, km; Pacific league first"),
    Fixture("nba", "instance", "nba.json",
            "a1696471e24cf35cc6a0dc0575fc42af84248fa807a911ef81b61183b851aba3",
            "North American basketball, 30 teams, miles; West conference first"),
    Fixture("two-point", "instance", "two-point.json",
            "87e9038ab393fa39f802a60de8f6e9d5334a9e32ed54e203316eafe2e569fd45",
            "n=3 with four teams at the origin and two at (1, 0)"),
    Fixture("six-point", "instance", "six-point.json",
            "ca0984ee7247ab39d71924f4c968bef2a0ab1545b16ab242f5a0aa0c5cb81e9a",
            "n=3 layout whose optimum needs 27 trips"),
    Fixture("equilateral", "instance", "equilateral.json",
            "bf46645e56e3255a0c076d06fd3b631452ea0d64ed4c3e256d36847e4f40c56e",
            "n=6: X pairs on the vertices of an equilateral triangle, Y at the centre"),
    Fixture("table1-left", "schedule", "table1-left.txt",
            "d104f70087e601d8248ffbce6fae5a546cbcfc4ec74aabe5525a9954de3505b8",
            "uniform n=3 schedule with 24 trips", "two-point"),
    Fixture("table1-right", "schedule", "table1-right.txt",
            "b279b2d345612b5081598840e802fc75c605b5f0bc2c55354edc5ff742222b1e",
            "n=3 schedule with 32 trips", "two-point"),
    Fixture("table2-a", "schedule", "table2-a.txt",
            "11bc335341554b222d772919f13f7c1d93575533ffd4cad2498c35b8788b46fe",
            "27-trip optimum of the six-point layout", "six-point"),
    Fixture("table2-b", "schedule", "table2-b.txt",
            "0a87f1799232f665d6fdbfaabc39a3a273581e7dcf562126a2202d466cd3a83e",
            "mirror image of table2-a", "six-point"),
    Fixture("table7", "schedule", "table7.txt",
            "c1932bb91caa86f8a5f373ad5ce6ba13e88f3d6d8b8041b0b26e3aa4e788ffab",
            "uniform optimum of the equilateral layout", "equilateral"),
    Fixture("table8", "schedule", "table8.txt",
            "bef216ba32a491a2166802dde9fa2a0a0b4adb29148829580a6a54e718d5c33b",
            "distance-optimal baseball schedule", "npb"),
    Fixture("table9", "schedule", "table9.txt",
            "89a91e59d59f8e12989762828f21796223d9d6834dba69c4fee35844d7561a4d",
            "uniform basketball schedule (CO cells read as CB)", "nba"),
    Fixture("unsat-example", "cnf", "unsat-example.cnf",
            "a98bcb4f9474799809598ca80e30cacab0ad87cf8dff4e86f96d1bc8a4c5c880",
            "balanced eight-clause formula with no satisfying assignment"),
)

FIXTURES = {f.id: f for f in _FIXTURES}


def fixture_ids() -> list[str]:
    return [f.id for f in _FIXTURES]


def fixture_info(fid: str) -> Fixture:
    key = fid[:-4] if fid.endswith(".cnf") else fid
    try:
        return FIXTURES[key]
    except KeyError:
        raise FixtureError(f"unknown fixture {fid!r}; known: {', '.join(FIXTURES)}") from None


def fixture_text(fid: str) -> str:
    """Raw file contents after checksum verification."""
    info = fixture_info(fid)
    raw = resources.files(__package__).joinpath("fixtures", info.filename).read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    if digest != info.sha256:
        raise FixtureError(f"checksum mismatch for {info.id}: {digest}")
    return raw.decode("utf-8")


def load_fixture(fid: str) -> Instance | Schedule | str:
    """Parsed fixture: an Instance, a Schedule, or CNF text."""
    info = fixture_info(fid)
    text = fixture_text(info.id)
    if info.kind == "instance":
        return instance_from_text(text)
    if info.kind == "schedule":
        return schedule_from_text(text, load_fixture(info.instance))
    return text


def paired_instance(fid: str) -> Instance:
    info = fixture_info(fid)
    if info.kind != "schedule":
        raise FixtureError(f"{info.id} is not a schedule fixture")
    return load_fixture(info.instance)
