"""The five-step construction of vertex-transitive {3,7} maps from 2-orbit
seeds, atlas generation and checks against the published counts."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import PreconditionViolated, StageInvariantViolated
from .flagcore import FlagSystem, canonical_code, map_code, petrie_lengths, summarize
from .groups import SeedEntry, role_variants, seed_map
from .operations import (
    EdgeMarking,
    belt_candidates,
    collapse_candidates,
    collapse_with_sites,
    dual,
    petrial,
    rebelt,
    site_partner,
    truncate,
    uncollapse,
    unrebelt,
    untruncations,
)
from .symmetry import SymmetryClass, symmetry_class, type_graph
from .typegraphs import is_vertex_transitive

log = logging.getLogger(__name__)

__all__ = [
    "TABLE1",
    "Stage",
    "Final",
    "PipelineResult",
    "AtlasRow",
    "MapRecord",
    "run_pipeline",
    "run_entry",
    "generate_atlas",
    "verify_table1",
    "verify_expectations",
    "classify",
    "surface_name",
]

# Non-regular, non-chiral vertex-transitive {3,7} maps per Euler
# characteristic: (orientable, non-orientable).  Absent rows are zero.
TABLE1: dict[int, tuple[int, int]] = {
    -2: (5, 2),
    -4: (10, 0),
    -6: (5, 0),
    -8: (11, 0),
    -10: (9, 2),
    -16: (16, 0),
    -18: (18, 0),
    -20: (33, 0),
    -24: (18, 0),
    -26: (0, 6),
    -28: (0, 4),
    -30: (0, 2),
    -32: (44, 0),
    -40: (15, 0),
}


@dataclass(frozen=True)
class Stage:
    name: str
    fs: FlagSystem
    marking: EdgeMarking | None = None


@dataclass(frozen=True)
class Final:
    case: str  # "B", "C" or "D"
    k_choice: int
    fs: FlagSystem
    symmetry: SymmetryClass
    code: bytes

    @property
    def map_code(self) -> str:
        return map_code(self.fs)


@dataclass(frozen=True)
class PipelineResult:
    seed: SeedEntry
    stages: tuple[Stage, ...]
    finals: tuple[Final, ...]
    labels: np.ndarray = field(repr=False)  # group-orbit label of each flag of M3

    def stage(self, name: str) -> Stage:
        for st in self.stages:
            if st.name == name:
                return st
        raise KeyError(name)

    def distinct_finals(self) -> list[Final]:
        seen: dict[bytes, Final] = {}
        for f in self.finals:
            seen.setdefault(f.code, f)
        return list(seen.values())


def _require(ok: bool, stage: str, invariant: str) -> None:
    if not ok:
        raise StageInvariantViolated(stage, invariant)


@dataclass(frozen=True)
class CutClass:
    labels: tuple[int, ...]
    sites: tuple[int, ...]
    touches_non_belt: bool


def cut_classes(m3: FlagSystem, labels: np.ndarray) -> list[CutClass]:
    """Ways of splitting every vertex of M3 along a group orbit of flags.

    A label whose flags are closed under :func:`site_partner` defines the
    sites (one flag per partner pair); labels of the same seed orbit giving
    the same set of cut flags form one class.  Classes are sorted by
    smallest label.  Labels are ``4 * part + j`` with ``part`` the seed orbit.
    """
    s0, s2 = m3.s0, m3.s2
    fo = summarize(m3).face_orbits
    non_belt = np.isin(fo, np.unique(fo[labels % 4 == 3]))
    by_key: dict[tuple, list[int]] = {}
    sites_of: dict[tuple, tuple[int, ...]] = {}
    for lab in sorted(int(x) for x in np.unique(labels)):
        orb = np.flatnonzero(labels == lab)
        part = np.array([site_partner(m3, int(f)) for f in orb])
        if not np.all(np.isin(part, orb)):
            continue
        sites = tuple(sorted({min(int(f), int(p)) for f, p in zip(orb, part)}))
        cut = set()
        for f in orb.tolist():
            cut.update((f, int(s0[f]), int(s2[f]), int(s0[s2[f]])))
        key = (lab // 4, frozenset(cut))
        by_key.setdefault(key, []).append(lab)
        sites_of.setdefault(key, sites)
    out = []
    for key, labs in by_key.items():
        sites = sites_of[key]
        touches = bool(non_belt[list(sites)].any() or non_belt[s2[list(sites)]].any())
        out.append(CutClass(tuple(labs), sites, touches))
    out.sort(key=lambda c: c.labels[0])
    return out


def run_pipeline(seed: SeedEntry, check_order: bool = True) -> PipelineResult:
    """Seed map, truncation, Petrial, dual, unrebelting, then every splitting.

    For a 2_01 seed the splittings along edges next to non-belt faces give
    case B; for a 2_0 seed they give case C and the splittings inside belts
    give case D.  ``k_choice`` numbers the classes of a case in order.
    """
    sm = seed_map(seed, check_order=check_order)
    g = sm.group.order
    m = sm.fs
    _require(m.n == 2 * g, "M", "2|G| flags")
    _require(summarize(m).e * 2 == g, "M", "|G|/2 edges")
    tr, inherited = truncate(m)
    _require(tr.n == 6 * g and summarize(tr).vertex_degrees == (3,) * summarize(tr).v, "Tr", "3-valent, 6|G| flags")
    _require(set(petrie_lengths(tr)) == {9}, "Tr", "Petrie polygons of length 9")
    pe = petrial(tr)
    if seed.cls == "2_01":
        _require(summarize(pe).orientable, "Pe", "orientable")
    du = dual(pe)
    _require(summarize(du).schlafli == (3, 9), "Du", "type {3,9}")
    base = inherited.flags(du)
    m3 = unrebelt(du, inherited)
    _require(m3.n == 8 * g and summarize(m3).schlafli == (3, 8), "M3", "type {3,8} with 8|G| flags")
    part = np.repeat(sm.part, 3)
    labels = 4 * np.repeat(part[base], 4) + np.tile(np.arange(4), base.size)
    stages = (
        Stage("M", m),
        Stage("Tr", tr, inherited),
        Stage("Pe", pe, inherited),
        Stage("Du", du, inherited),
        Stage("M3", m3),
    )
    chi = -g // 6
    finals = []
    counters = {"B": 0, "C": 0, "D": 0}
    for cc in cut_classes(m3, labels):
        if seed.cls == "2_01":
            if not cc.touches_non_belt:
                continue
            case = "B"
        else:
            case = "C" if cc.touches_non_belt else "D"
        try:
            fin = uncollapse(m3, list(cc.sites))
        except PreconditionViolated:
            continue
        counters[case] += 1
        s = summarize(fin)
        stage = f"final {case}{counters[case]}"
        _require(fin.n == 14 * g, stage, "14|G| flags")
        _require(s.schlafli == (3, 7), stage, "type {3,7}")
        _require(s.chi == chi, stage, "chi = -|G|/6")
        sym = symmetry_class(fin)
        _require(sym.kind in ("regular", "chiral") or sym.orbits == 14, stage, "regular, chiral or 14-orbit")
        _require(is_vertex_transitive(type_graph(fin)), stage, "vertex-transitive")
        finals.append(Final(case, counters[case], fin, sym, canonical_code(fin)))
    _require(len(finals) == (2 if seed.cls == "2_01" else 4), "M3", "expected number of splittings")
    return PipelineResult(seed, stages, tuple(finals), labels)


# --- catalog runs -------------------------------------------------------------


@dataclass(frozen=True)
class MapRecord:
    chi: int
    orientable: bool
    code: bytes
    seed: str
    case: str
    k_choice: int
    flags: int
    cls: str

    @property
    def map_code(self) -> str:
        import hashlib

        return hashlib.sha256(self.code).hexdigest()[:16]

    @property
    def counted(self) -> bool:
        return self.cls not in ("regular", "chiral")


def surface_name(chi: int, orientable: bool) -> str:
    """``O<g>`` for the orientable surface of genus g, ``N<k>`` for the non-orientable one."""
    return f"O{(2 - chi) // 2}" if orientable else f"N{2 - chi}"


def run_entry(seed: SeedEntry) -> list[MapRecord]:
    """Distinct finals of a catalog entry; a 2_01 entry is run with each involution as rho0."""
    out: dict[bytes, MapRecord] = {}
    for var in role_variants(seed):
        res = run_pipeline(var)
        for f in res.finals:
            if f.code in out:
                continue
            s = summarize(f.fs)
            out[f.code] = MapRecord(s.chi, s.orientable, f.code, var.name, f.case, f.k_choice, f.fs.n, str(f.symmetry))
    return list(out.values())


def _run_all(seeds: Sequence[SeedEntry], workers: int) -> list[list[MapRecord]]:
    if workers <= 1 or len(seeds) <= 1:
        return [run_entry(s) for s in seeds]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(run_entry, seeds))


@dataclass(frozen=True)
class AtlasRow:
    chi: int
    orientable: int
    nonorientable: int

    @property
    def total(self) -> int:
        return self.orientable + self.nonorientable


def generate_atlas(
    catalog: Iterable[SeedEntry], chi_min: int = -40, chi_max: int = -1, workers: int = 1
) -> tuple[list[AtlasRow], list[MapRecord]]:
    """Rows for every chi in range (descending) and the distinct maps, sorted by chi then code.

    Regular and chiral maps are listed among the maps but not counted.
    """
    seeds = [s for s in catalog if chi_min <= s.chi <= chi_max]
    maps: dict[bytes, MapRecord] = {}
    for recs in _run_all(seeds, workers):
        for r in recs:
            maps.setdefault(r.code, r)
    records = sorted(maps.values(), key=lambda r: (-r.chi, r.map_code))
    rows = []
    for chi in range(chi_max, chi_min - 1, -1):
        o = sum(1 for r in records if r.chi == chi and r.orientable and r.counted)
        no = sum(1 for r in records if r.chi == chi and not r.orientable and r.counted)
        rows.append(AtlasRow(chi, o, no))
    return rows, records


def atlas_tsv(rows: Sequence[AtlasRow]) -> str:
    out = ["chi\torientable\tnonorientable\ttotal"]
    out += [f"{r.chi}\t{r.orientable}\t{r.nonorientable}\t{r.total}" for r in rows]
    return "\n".join(out) + "\n"


def maps_tsv(records: Sequence[MapRecord]) -> str:
    out = ["chi\tsurface\tmap_code\tseed\tcase\tk_choice\tflags\tclass"]
    for r in records:
        out.append(
            f"{r.chi}\t{surface_name(r.chi, r.orientable)}\t{r.map_code}\t{r.seed}\t{r.case}\t{r.k_choice}\t{r.flags}\t{r.cls}"
        )
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class TableCheck:
    rows: list[AtlasRow]
    mismatches: list[tuple[int, tuple[int, int], tuple[int, int]]]  # chi, expected, found

    @property
    def ok(self) -> bool:
        return not self.mismatches


def verify_table1(catalog: Iterable[SeedEntry], chi_min: int = -40, chi_max: int = -1, workers: int = 1) -> TableCheck:
    rows, _ = generate_atlas(catalog, chi_min, chi_max, workers)
    bad = []
    for r in rows:
        want = TABLE1.get(r.chi, (0, 0))
        if (r.orientable, r.nonorientable) != want:
            bad.append((r.chi, want, (r.orientable, r.nonorientable)))
    return TableCheck(rows, bad)


@dataclass(frozen=True)
class ExpectCheck:
    name: str
    expected: int | None
    found: int

    @property
    def ok(self) -> bool:
        return self.expected is None or self.expected == self.found


def verify_expectations(catalog: Iterable[SeedEntry], workers: int = 1) -> list[ExpectCheck]:
    seeds = list(catalog)
    return [ExpectCheck(s.name, s.expect, len(recs)) for s, recs in zip(seeds, _run_all(seeds, workers))]


# --- reverse direction --------------------------------------------------------------


@dataclass
class Classification:
    summary: dict
    symmetry: str
    seed_map: FlagSystem | None = None
    stages: list[tuple[str, FlagSystem]] = field(default_factory=list)
    round_trip: bool | None = None


def _recover(fs: FlagSystem) -> tuple[FlagSystem, list[tuple[str, FlagSystem]], bool] | None:
    """Undo the construction; prefers a chain whose forward run reproduces every stage."""
    from .flagcore import are_isomorphic

    n = fs.n
    fallback = None
    for spec in collapse_candidates(fs):
        try:
            m3, sites = collapse_with_sites(fs, spec)
        except PreconditionViolated:
            continue
        if 14 * m3.n != 8 * n or summarize(m3).schlafli != (3, 8):
            continue
        for belts in belt_candidates(m3):
            try:
                du = rebelt(m3, belts)
            except PreconditionViolated:
                continue
            if summarize(du).schlafli != (3, 9):
                continue
            tr = petrial(dual(du))
            for m in untruncations(tr):
                stages = [("M3", m3), ("Du", du), ("Tr", tr), ("M", m)]
                # forward again and compare every stage
                tr2, inh = truncate(m)
                du2 = dual(petrial(tr2))
                ok = are_isomorphic(du2, du) is not None
                if ok:
                    m3b = unrebelt(du2, inh)
                    ok = are_isomorphic(m3b, m3) is not None
                ok = ok and are_isomorphic(uncollapse(m3, sites), fs) is not None
                if ok:
                    return m, stages, True
                if fallback is None:
                    fallback = (m, stages, False)
    return fallback


def classify(fs: FlagSystem) -> Classification:
    """Summary and symmetry class; for a 14-orbit {3,7} map also the recovered seed map."""
    s = summarize(fs)
    sym = symmetry_class(fs)
    out = Classification(s.as_dict(), str(sym))
    if s.schlafli == (3, 7) and sym.orbits == 14:
        rec = _recover(fs)
        if rec is not None:
            out.seed_map, out.stages, out.round_trip = rec
    return out
