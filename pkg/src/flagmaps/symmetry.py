"""Automorphism groups, flag orbits, type graphs and symmetry classes."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterator, Sequence

import numpy as np

from .errors import LabelingMismatch, MalformedTypeGraph
from .flagcore import FlagSystem, canonical_form, require_valid
from .typegraphs import TypeGraph, canonical_code as tg_code, is_vertex_transitive

__all__ = [
    "AutGroup",
    "automorphisms",
    "flag_orbits",
    "type_graph",
    "quotient_graph",
    "SymmetryClass",
    "symmetry_class",
    "reference_type_graphs",
    "admissible_labeling",
    "admissible_labelings",
]


@dataclass(frozen=True)
class AutGroup:
    # row r is an automorphism as an image array: flag f goes to elements[r, f]
    elements: np.ndarray
    orbits: np.ndarray

    @property
    def order(self) -> int:
        return int(self.elements.shape[0])

    @property
    def orbit_count(self) -> int:
        return int(np.unique(self.orbits).size)


def automorphisms(fs: FlagSystem) -> AutGroup:
    """The full automorphism group, read off the canonical form.

    Every base flag attaining the minimal breadth-first code is the image of
    the first one under a unique automorphism, so the surviving orders are
    exactly the group.
    """
    cached = fs._cache.get("aut")
    if cached is not None:
        return cached
    form = canonical_form(fs)
    orders = form.orders.astype(np.int64)
    base = orders[0]
    elems = np.empty_like(orders, dtype=np.int32)
    elems[:, base] = orders
    order = elems.shape[0]
    if order == fs.n:
        orbits = np.zeros(fs.n, dtype=np.int64)
    else:
        orbits = elems.min(axis=0).astype(np.int64)
    out = AutGroup(elems, orbits)
    fs._cache["aut"] = out
    return out


def flag_orbits(fs: FlagSystem) -> np.ndarray:
    """Automorphism-orbit label of each flag (the smallest flag of its orbit)."""
    return automorphisms(fs).orbits


def quotient_graph(fs: FlagSystem, labels: Sequence[int]) -> tuple[TypeGraph, list[int]]:
    """The type graph of a flag labelling compatible with the adjacencies.

    Returns the graph and the sorted list of label values (vertex ``i`` of
    the graph is ``values[i]``).  Raises :class:`LabelingMismatch` when the
    labelling is not compatible.
    """
    labels = np.asarray(labels, dtype=np.int64)
    values = sorted(int(x) for x in np.unique(labels))
    idx = {v: i for i, v in enumerate(values)}
    k = len(values)
    nbr = []
    for c, p in enumerate(fs.s):
        img = [-1] * k
        for f, g in zip(labels.tolist(), labels[p].tolist()):
            a, b = idx[f], idx[g]
            if img[a] == -1:
                img[a] = b
            elif img[a] != b:
                raise LabelingMismatch(f"label {f} has two {c}-neighbours")
        nbr.append(tuple(img))
    try:
        return TypeGraph(k, tuple(nbr)), values  # type: ignore[arg-type]
    except MalformedTypeGraph as exc:
        raise LabelingMismatch(str(exc)) from exc


def type_graph(fs: FlagSystem) -> TypeGraph:
    """Quotient of the flag graph by the automorphism group; orbits in order of smallest flag."""
    return quotient_graph(fs, flag_orbits(fs))[0]


@dataclass(frozen=True)
class SymmetryClass:
    kind: str  # "regular", "chiral", "two_orbit" or "k_orbit"
    orbits: int
    detail: str = ""  # two_orbit: "2_0", "2_01", ...; k_orbit: "B", "C", "D" or ""

    def __str__(self) -> str:
        if self.kind in ("regular", "chiral"):
            return self.kind
        if self.kind == "two_orbit":
            return self.detail
        return f"{self.orbits}-orbit" + (f" {self.detail}" if self.detail else "")


@lru_cache(maxsize=1)
def reference_type_graphs() -> dict[str, TypeGraph]:
    """Stored type graphs of the 14-orbit vertex-transitive {3,7} maps and the 8-vertex labelling graphs."""
    from .formats import read_typegraphs

    text = resources.files("flagmaps.data").joinpath("typegraphs.txt").read_text()
    return dict(read_typegraphs(text))


def symmetry_class(fs: FlagSystem) -> SymmetryClass:
    require_valid(fs)
    aut = automorphisms(fs)
    k = fs.n // aut.order
    if k == 1:
        return SymmetryClass("regular", 1)
    tg = type_graph(fs)
    if k == 2:
        semi = sorted({c for c, _ in tg.semi_edges()})
        if not semi:
            return SymmetryClass("chiral", 2)
        return SymmetryClass("two_orbit", 2, "2_" + "".join(map(str, semi)))
    code = tg_code(tg)
    for name, ref in reference_type_graphs().items():
        if ref.k == k and tg_code(ref) == code:
            return SymmetryClass("k_orbit", k, name)
    return SymmetryClass("k_orbit", k)


# --- labellings -----------------------------------------------------------------


def _propagate(fs: FlagSystem, tg: TypeGraph, start: int) -> np.ndarray | None:
    lab = np.full(fs.n, -1, dtype=np.int64)
    lab[0] = start
    stack = [0]
    s = [p.tolist() for p in fs.s]
    while stack:
        f = stack.pop()
        a = int(lab[f])
        for c in range(3):
            g = s[c][f]
            want = tg.nbr[c][a]
            if lab[g] == -1:
                lab[g] = want
                stack.append(g)
            elif lab[g] != want:
                return None
    return lab


def admissible_labelings(fs: FlagSystem, tg: TypeGraph) -> Iterator[np.ndarray]:
    """Every labelling of flags by type-graph vertices that respects adjacency
    and keeps equal labels inside one automorphism orbit; ordered by the label of flag 0."""
    require_valid(fs)
    orbits = flag_orbits(fs)
    for start in range(tg.k):
        lab = _propagate(fs, tg, start)
        if lab is None:
            continue
        ok = True
        for v in range(tg.k):
            o = np.unique(orbits[lab == v])
            if o.size > 1:
                ok = False
                break
        if ok:
            yield lab


def admissible_labeling(fs: FlagSystem, tg: TypeGraph) -> np.ndarray | None:
    return next(admissible_labelings(fs, tg), None)


def is_vertex_transitive_map(fs: FlagSystem) -> bool:
    return is_vertex_transitive(type_graph(fs))
