"""Text formats: FLAGMAP 1, MARKING 1, TYPEGRAPH 1, SEEDS 1 and group files.

All flag and vertex numbers in files are 1-indexed.
"""

from __future__ import annotations

import re
import shlex
from pathlib import Path
from typing import Iterable

from .errors import InvalidFlagSystem, MalformedTypeGraph, ParseError
from .flagcore import FlagSystem, validate
from .groups import Perm, SeedEntry, format_cycles, parse_cycles
from .operations import EdgeMarking
from .typegraphs import TypeGraph

__all__ = [
    "read_flagmap",
    "write_flagmap",
    "load_flagmap",
    "save_flagmap",
    "read_marking",
    "write_marking",
    "read_typegraphs",
    "write_typegraph",
    "read_seeds",
    "write_seeds",
    "load_seeds",
    "read_groups",
]


def _lines(text: str) -> list[str]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


# --- FLAGMAP ---------------------------------------------------------------


def read_flagmap(text: str, allow_multi_edges: bool = False) -> FlagSystem:
    lines = _lines(text)
    if len(lines) != 5 or lines[0] != "FLAGMAP 1":
        raise ParseError("expected 'FLAGMAP 1', 'flags <n>' and three involution lines")
    m = re.fullmatch(r"flags\s+(\d+)", lines[1])
    if not m:
        raise ParseError(f"bad flag count line: {lines[1]!r}")
    n = int(m.group(1))
    rows = []
    for i, line in enumerate(lines[2:]):
        head, _, body = line.partition(":")
        if head.strip() != f"s{i}":
            raise ParseError(f"expected 's{i}:' line, got {line!r}")
        try:
            vals = [int(t) for t in body.split()]
        except ValueError as exc:
            raise ParseError(f"s{i}: non-integer image") from exc
        if len(vals) != n:
            raise ParseError(f"s{i}: {len(vals)} images for {n} flags")
        if any(v < 1 or v > n for v in vals):
            raise ParseError(f"s{i}: image out of range 1..{n}")
        rows.append(vals)
    fs = FlagSystem.from_one_based(*rows)
    bad = validate(fs, allow_multi_edges)
    if bad:
        raise InvalidFlagSystem(bad)
    return fs


def write_flagmap(fs: FlagSystem) -> str:
    rows = fs.one_based()
    out = ["FLAGMAP 1", f"flags {fs.n}"]
    out += [f"s{i}: " + " ".join(map(str, r)) for i, r in enumerate(rows)]
    return "\n".join(out) + "\n"


def load_flagmap(path: str | Path, allow_multi_edges: bool = False) -> FlagSystem:
    return read_flagmap(Path(path).read_text(), allow_multi_edges)


def save_flagmap(fs: FlagSystem, path: str | Path) -> None:
    Path(path).write_text(write_flagmap(fs))


# --- MARKING ------------------------------------------------------------------


def read_marking(text: str) -> EdgeMarking:
    lines = _lines(text)
    if not lines or lines[0] != "MARKING 1":
        raise ParseError("expected 'MARKING 1' header")
    try:
        ids = [int(t) - 1 for line in lines[1:] for t in line.split()]
    except ValueError as exc:
        raise ParseError("edge ids must be integers") from exc
    return EdgeMarking(frozenset(ids))


def write_marking(m: EdgeMarking) -> str:
    return "MARKING 1\n" + " ".join(str(e + 1) for e in sorted(m.edges)) + "\n"


# --- TYPEGRAPH -------------------------------------------------------------------


def read_typegraphs(text: str) -> list[tuple[str, TypeGraph]]:
    """Read one or more TYPEGRAPH 1 blocks; a ``name <x>`` line is optional."""
    blocks: list[list[str]] = []
    for line in _lines(text):
        if line == "TYPEGRAPH 1":
            blocks.append([])
        elif not blocks:
            raise ParseError("expected 'TYPEGRAPH 1' header")
        else:
            blocks[-1].append(line)
    out = []
    for n, block in enumerate(blocks):
        name = str(n + 1)
        k = None
        edges: dict[int, list[tuple[int, int]]] = {}
        for line in block:
            if line.startswith("name "):
                name = line[5:].strip()
            elif m := re.fullmatch(r"vertices\s+(\d+)", line):
                k = int(m.group(1))
            elif m := re.fullmatch(r"edges\s+([012])\s*:(.*)", line):
                pairs = []
                for item in m.group(2).split(","):
                    item = item.strip()
                    if not item:
                        continue
                    mm = re.fullmatch(r"(\d+)\s*-\s*(\d+)", item)
                    if not mm:
                        raise ParseError(f"bad edge {item!r}")
                    pairs.append((int(mm.group(1)) - 1, int(mm.group(2)) - 1))
                edges[int(m.group(1))] = pairs
            else:
                raise ParseError(f"unexpected line {line!r}")
        if k is None or sorted(edges) != [0, 1, 2]:
            raise ParseError(f"type graph {name}: need a vertex count and three edge lines")
        try:
            out.append((name, TypeGraph.from_edges(k, [edges[0], edges[1], edges[2]])))
        except MalformedTypeGraph as exc:
            raise ParseError(f"type graph {name}: {exc}") from exc
    return out


def write_typegraph(tg: TypeGraph, name: str | None = None) -> str:
    out = ["TYPEGRAPH 1"]
    if name:
        out.append(f"name {name}")
    out.append(f"vertices {tg.k}")
    for i in range(3):
        out.append(f"edges {i}: " + ", ".join(f"{a + 1}-{b + 1}" for a, b in tg.edges(i)))
    return "\n".join(out) + "\n"


# --- SEEDS -------------------------------------------------------------------------


_PERM_KEYS = ("rho0", "rho1", "rho212", "sigma12")


def _blocks(text: str, header: str, tag: str) -> list[dict[str, str]]:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != header:
        raise ParseError(f"expected {header!r} header")
    blocks: list[dict[str, str]] = []
    for line in lines[1:]:
        if line == tag:
            blocks.append({})
            continue
        if not blocks:
            raise ParseError(f"entry outside a {tag} block: {line!r}")
        key, eq, val = line.partition("=")
        if not eq:
            raise ParseError(f"expected key = value, got {line!r}")
        key, val = key.strip(), val.strip()
        if val.startswith('"'):
            try:
                parts = shlex.split(val)
            except ValueError as exc:
                raise ParseError(f"bad quoted value {val!r}") from exc
            val = parts[0] if parts else ""
        if key in blocks[-1]:
            raise ParseError(f"duplicate key {key!r}")
        blocks[-1][key] = val
    return blocks


def _perm(val: str, what: str) -> Perm:
    try:
        return parse_cycles(val)
    except ValueError as exc:
        raise ParseError(f"{what}: {exc}") from exc


def read_seeds(text: str) -> list[SeedEntry]:
    out = []
    for b in _blocks(text, "SEEDS 1", "[seed]"):
        name = b.get("name")
        if not name:
            raise ParseError("seed without a name")
        try:
            chi = int(b["chi"])
            cls = b["class"]
            expect = int(b["expect"]) if "expect" in b else None
        except (KeyError, ValueError) as exc:
            raise ParseError(f"seed {name}: bad or missing field {exc}") from exc
        if cls not in ("2_01", "2_0"):
            raise ParseError(f"seed {name}: unknown class {cls!r}")
        need = ("rho0", "rho1", "rho212") if cls == "2_01" else ("rho0", "sigma12")
        missing = [k for k in need if k not in b]
        if missing:
            raise ParseError(f"seed {name}: missing {', '.join(missing)}")
        perms = {k: _perm(b[k], f"seed {name} {k}") for k in need}
        out.append(SeedEntry(name, chi, cls, expect=expect, note=b.get("note", ""), **perms))
    names = [s.name for s in out]
    if len(set(names)) != len(names):
        raise ParseError("duplicate seed names")
    return out


def write_seeds(seeds: Iterable[SeedEntry]) -> str:
    out = ["SEEDS 1"]
    for s in seeds:
        out += ["", "[seed]", f"name = {s.name}", f"chi = {s.chi}", f"class = {s.cls}"]
        for k in _PERM_KEYS:
            p = getattr(s, k)
            if p is not None:
                out.append(f"{k} = {format_cycles(p)}")
        if s.expect is not None:
            out.append(f"expect = {s.expect}")
        if s.note:
            out.append(f'note = "{s.note}"')
    return "\n".join(out) + "\n"


def load_seeds(path: str | Path) -> list[SeedEntry]:
    return read_seeds(Path(path).read_text())


# --- group files -----------------------------------------------------------------


def read_groups(text: str) -> list[tuple[str, list[Perm]]]:
    """``GROUPS 1`` then ``[group]`` blocks with ``name``, ``gens`` (space-separated cycle strings) and optional ``order``."""
    out = []
    for b in _blocks(text, "GROUPS 1", "[group]"):
        name = b.get("name", str(len(out) + 1))
        if "gens" not in b:
            raise ParseError(f"group {name}: missing gens")
        gens = [_perm(tok, f"group {name}") for tok in b["gens"].split()]
        out.append((name, gens))
        if "order" in b:
            try:
                int(b["order"])
            except ValueError as exc:
                raise ParseError(f"group {name}: bad order") from exc
    return out


def group_orders(text: str) -> dict[str, int]:
    return {b.get("name", ""): int(b["order"]) for b in _blocks(text, "GROUPS 1", "[group]") if "order" in b}
