"""Reading and writing instance files (JSON) and schedule files (plain text).

Schedule files hold one line per team in index order::

    x1: @y1 @y2 @y3 y1 y2 y3

A bare opponent name is a home game, ``@name`` an away game.  ``#`` starts a
comment.  Writers are deterministic so fixtures can be diffed byte for byte.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import Instance, Schedule


class FormatError(ValueError):
    pass


def instance_to_text(inst: Instance) -> str:
    def num(v):
        if inst.is_integral:
            return str(int(v))
        return repr(float(v))

    lines = ["{", f'  "n": {inst.n},', '  "teams": [']
    teams = []
    for t, name in enumerate(inst.team_names):
        teams.append(f'    {{"name": {json.dumps(name)}, "league": "{inst.league(t)}"}}')
    lines.append(",\n".join(teams))
    lines.append("  ],")
    lines.append('  "matrix": [')
    rows = ["    [" + ", ".join(num(v) for v in row) + "]" for row in inst.dist]
    lines.append(",\n".join(rows))
    if inst.coords is not None:
        lines.append("  ],")
        lines.append('  "coords": [')
        pts = [f"    [{float(x)!r}, {float(y)!r}]" for x, y in inst.coords]
        lines.append(",\n".join(pts))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def instance_from_text(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"instance file is not valid JSON: {exc}") from exc
    try:
        n = int(doc["n"])
        teams = doc["teams"]
        matrix = doc["matrix"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"instance file lacks field {exc}") from exc
    leagues = [t["league"] for t in teams]
    if leagues != ["X"] * n + ["Y"] * n:
        raise FormatError("teams must list league X first, then league Y")
    flat = [v for row in matrix for v in row]
    integral = all(isinstance(v, int) for v in flat)
    dist = np.array(matrix, dtype=np.int64 if integral else float)
    coords = doc.get("coords")
    if coords is not None:
        coords = tuple((float(x), float(y)) for x, y in coords)
    try:
        return Instance(n, tuple(t["name"] for t in teams), dist, coords)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def schedule_to_text(sched: Schedule, inst: Instance, header: str | None = None) -> str:
    names = inst.team_names
    width = max(len(nm) for nm in names)
    out = []
    if header:
        out.extend(f"# {line}" for line in header.splitlines())
    for t in range(sched.slot_count):
        cells = []
        for s in range(sched.slot_count):
            o = names[int(sched.opp[t, s])]
            cells.append(o if sched.home[t, s] else "@" + o)
        out.append(f"{names[t]}:".ljust(width + 2) + " ".join(cells))
    return "\n".join(out) + "\n"


def schedule_from_text(text: str, inst: Instance) -> Schedule:
    m = inst.size
    rows: dict[int, tuple[list[int], list[bool]]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise FormatError(f"line {lineno}: expected 'team: cells'")
        head, body = line.split(":", 1)
        try:
            team = inst.index(head.strip())
        except KeyError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
        cells = body.split()
        if len(cells) != m:
            raise FormatError(f"line {lineno}: expected {m} cells, got {len(cells)}")
        opps, homes = [], []
        for cell in cells:
            away = cell.startswith("@")
            try:
                opps.append(inst.index(cell.lstrip("@")))
            except KeyError as exc:
                raise FormatError(f"line {lineno}: {exc}") from None
            homes.append(not away)
        if team in rows:
            raise FormatError(f"line {lineno}: duplicate row for {head.strip()}")
        rows[team] = (opps, homes)
    if sorted(rows) != list(range(m)):
        # a file may list only league X; league Y follows by complementarity
        if sorted(rows) == list(range(inst.n)):
            away = np.array([rows[t][0] for t in range(inst.n)])
            home = np.array([rows[t][1] for t in range(inst.n)])
            return Schedule.from_away_rows(inst.n, away, home)
        raise FormatError("schedule must list every team (or every league-X team)")
    opp = np.array([rows[t][0] for t in range(m)])
    home = np.array([rows[t][1] for t in range(m)])
    return Schedule(inst.n, opp, home)


def read_instance(path) -> Instance:
    return instance_from_text(Path(path).read_text())


def read_schedule(path, inst: Instance) -> Schedule:
    return schedule_from_text(Path(path).read_text(), inst)


def write_instance(path, inst: Instance) -> None:
    Path(path).write_text(instance_to_text(inst))


def write_schedule(path, sched: Schedule, inst: Instance, header: str | None = None) -> None:
    Path(path).write_text(schedule_to_text(sched, inst, header))
