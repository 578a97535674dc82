"""Map operations on flag systems and the inverses used by the {3,7} construction.

New flags produced by a surgery are numbered in blocks: truncation gives
flag ``f`` the three flags ``3f, 3f+1, 3f+2`` (written ``(f,1)``,
``(f,2)``, ``(f,3)`` below), unrebelting gives each base flag four and
rebelting gives each base flag three.  These numberings are relied on by
the pipeline to transport group actions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidFlagSystem, PreconditionViolated
from .flagcore import FlagSystem, require_valid, summarize, validate

__all__ = [
    "EdgeMarking",
    "CollapseSpec",
    "BeltSpec",
    "dual",
    "petrial",
    "truncate",
    "untruncate",
    "untruncations",
    "collapse",
    "collapse_with_sites",
    "check_collapse",
    "collapse_candidates",
    "uncollapse",
    "site_partner",
    "rebelt",
    "belt_candidates",
    "unrebelt",
    "transport_truncate",
    "transport_unrebelt",
]

_INT = np.int64


def _checked(s0, s1, s2, stage: str) -> FlagSystem:
    fs = FlagSystem(s0, s1, s2)
    bad = validate(fs)
    if bad:
        raise PreconditionViolated(stage, "result is not a flag system (" + ", ".join(bad) + ")")
    return fs


# --- markings ----------------------------------------------------------------


@dataclass(frozen=True)
class EdgeMarking:
    """A set of edges, each named by the smallest flag of its edge orbit."""

    edges: frozenset[int]

    @classmethod
    def from_flags(cls, fs: FlagSystem, flags: Iterable[int]) -> "EdgeMarking":
        eo = summarize(fs).edge_orbits
        return cls(frozenset(int(eo[f]) for f in flags))

    def check(self, fs: FlagSystem) -> None:
        eo = summarize(fs).edge_orbits
        bad = [e for e in self.edges if not (0 <= e < fs.n) or eo[e] != e]
        if bad:
            raise PreconditionViolated("marking", f"not an edge id: {sorted(bad)[0] + 1}")

    def flags(self, fs: FlagSystem) -> np.ndarray:
        """All flags lying on marked edges, ascending."""
        self.check(fs)
        eo = summarize(fs).edge_orbits
        return np.flatnonzero(np.isin(eo, np.fromiter(self.edges, dtype=_INT, count=len(self.edges))))

    def __len__(self) -> int:
        return len(self.edges)


# --- dual, Petrial, truncation ---------------------------------------------------


def dual(fs: FlagSystem) -> FlagSystem:
    """Swap the roles of vertices and faces.  Edge orbits, hence markings, are unchanged."""
    require_valid(fs)
    return FlagSystem(fs.s2, fs.s1, fs.s0)


def petrial(fs: FlagSystem) -> FlagSystem:
    """Replace faces by Petrie polygons.  Vertices and edges, hence markings, are unchanged."""
    require_valid(fs)
    s0, s1, s2 = fs.s
    out = FlagSystem(s0[s2], s1, s2)
    bad = validate(out)
    if bad:
        raise InvalidFlagSystem(["degenerate-petrial"] + bad)
    return out


def truncate(fs: FlagSystem) -> tuple[FlagSystem, EdgeMarking]:
    """Cut off every vertex.  Returns the truncation and its inherited edges."""
    require_valid(fs)
    s0, s1, s2 = fs.s
    n = fs.n
    f = np.arange(n, dtype=_INT)
    t0 = np.empty(3 * n, dtype=_INT)
    t1 = np.empty(3 * n, dtype=_INT)
    t2 = np.empty(3 * n, dtype=_INT)
    a, b, c = 3 * f, 3 * f + 1, 3 * f + 2
    t0[a], t0[b], t0[c] = 3 * s0, 3 * s1 + 1, 3 * s1 + 2
    t1[a], t1[b], t1[c] = b, a, 3 * s2 + 2
    t2[a], t2[b], t2[c] = 3 * s2, c, b
    out = FlagSystem(t0, t1, t2)
    return out, EdgeMarking.from_flags(out, a)


def transport_truncate(p: np.ndarray) -> np.ndarray:
    """The flag permutation of a truncation induced by permutation ``p`` of the original flags."""
    p = np.asarray(p, dtype=_INT)
    return (3 * p[:, None] + np.arange(3)).reshape(-1)


def untruncations(fs: FlagSystem) -> Iterator[FlagSystem]:
    """Every map whose truncation is ``fs`` (at most three, one per face at
    the vertex of flag 0); none when ``fs`` is not a truncation.

    The faces coming from the original vertices are found by choosing one
    of the faces at the vertex of flag 0 and propagating; each choice is
    verified by truncating the candidate and comparing flag by flag.
    """
    require_valid(fs)
    sm = summarize(fs)
    if set(sm.vertex_degrees) != {3}:
        return
    s0, s1, s2 = fs.s
    fo = sm.face_orbits
    # from a flag (f,3) to the flag (s0 f, 3)
    step = s2[s1[s0[s1[s2]]]]
    starts = sorted({int(fo[x]) for x in (0, int(s2[s1[0]]), int(s2[s1[s2[s1[0]]]]))})
    for face in starts:
        res = _untruncate_from(fs, fo, step, face)
        if res is not None:
            yield res


def untruncate(fs: FlagSystem) -> FlagSystem | None:
    """A map whose truncation is ``fs``, or None when ``fs`` is not a truncation.

    Truncation is not injective: use :func:`untruncations` for every preimage.
    """
    return next(untruncations(fs), None)


def _untruncate_from(fs: FlagSystem, fo: np.ndarray, step: np.ndarray, face: int) -> FlagSystem | None:
    s0, s1, s2 = fs.s
    n = fs.n
    if n % 3:
        return None
    chosen = np.zeros(n, dtype=bool)
    faces = {face}
    stack = [face]
    members = {}
    for f, lab in enumerate(fo.tolist()):
        members.setdefault(lab, []).append(f)
    while stack:
        fc = stack.pop()
        for x in members[fc]:
            chosen[x] = True
            g = int(fo[step[x]])
            if g not in faces:
                faces.add(g)
                stack.append(g)
    third = np.flatnonzero(chosen)
    m = third.size
    if 3 * m != n:
        return None
    second = s2[third]
    first = s1[second]
    pos = np.full(n, -1, dtype=_INT)
    pos[third] = np.arange(m)
    if np.any(chosen[second]) or np.any(chosen[first]):
        return None
    cover = np.concatenate([first, second, third])
    if np.unique(cover).size != n:
        return None
    m0 = pos[step[third]]
    m1 = pos[s0[third]]
    m2 = pos[s1[third]]
    if np.any(m0 < 0) or np.any(m1 < 0) or np.any(m2 < 0):
        return None
    cand = FlagSystem(m0, m1, m2)
    if validate(cand):
        return None
    tr, _ = truncate(cand)
    phi = np.empty(n, dtype=_INT)
    phi[3 * np.arange(m)] = first
    phi[3 * np.arange(m) + 1] = second
    phi[3 * np.arange(m) + 2] = third
    for a, b in zip(tr.s, fs.s):
        if not np.array_equal(phi[a], b[phi]):
            return None
    return cand


# --- collapsing ----------------------------------------------------------------


@dataclass(frozen=True)
class CollapseSpec:
    """The family of triangles to collapse, each named by its smallest flag."""

    triangles: frozenset[int]


def _face_members(fo: np.ndarray) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for f, lab in enumerate(fo.tolist()):
        out.setdefault(lab, []).append(f)
    return out


def check_collapse(fs: FlagSystem, spec: CollapseSpec) -> list[tuple[int, int]]:
    """Check the collapsing preconditions and return the pairs as base flags.

    Each pair is reported by a flag ``(u, uv, F1)`` and ``F2`` is the face
    across ``uv``.  Raises :class:`PreconditionViolated` naming the item.
    """
    require_valid(fs)
    sm = summarize(fs)
    fo, vo, eo = sm.face_orbits, sm.vertex_orbits, sm.edge_orbits
    members = _face_members(fo)
    s0, s1, s2 = fs.s
    fam = set(spec.triangles)
    for t in fam:
        if t not in members or fo[t] != t:
            raise PreconditionViolated("3", f"flag {t + 1} does not name a face")
        fl = members[t]
        if len(fl) != 6:
            raise PreconditionViolated("3", f"face {t + 1} is not a triangle")
        if len({int(vo[x]) for x in fl}) != 3:
            raise PreconditionViolated("3", f"triangle {t + 1} has a repeated vertex")
    partner: dict[int, int] = {}
    shared: dict[int, int] = {}
    for t in fam:
        hits = {}
        for x in members[t]:
            g = int(fo[s2[x]])
            if g in fam and g != t:
                hits.setdefault(int(eo[x]), g)
        if len(hits) != 1:
            raise PreconditionViolated("2", f"triangle {t + 1} shares {len(hits)} edges with the family")
        (edge, g), = hits.items()
        partner[t] = g
        shared[t] = edge
    for t, g in partner.items():
        if partner[g] != t:
            raise PreconditionViolated("2", f"triangles {t + 1} and {g + 1} do not pair up")
        vt = {int(vo[x]) for x in members[t]}
        vg = {int(vo[x]) for x in members[g]}
        if len(vt | vg) != 4:
            raise PreconditionViolated("3", f"pair {t + 1}/{g + 1} does not span four vertices")
    # incidence pattern at each vertex
    at: dict[int, set[int]] = {}
    for t in fam:
        for x in members[t]:
            at.setdefault(int(vo[x]), set()).add(t)
    for v, ts in at.items():
        k = len(ts)
        pairs = sum(1 for t in ts if partner[t] in ts and _edge_has_vertex(fs, shared[t], v, vo, eo)) // 2
        ok = k == 1 or (k == 2 and pairs == 1) or (k == 3 and pairs == 1)
        if not ok:
            raise PreconditionViolated("1", f"vertex of flag {v + 1} meets {k} family triangles")
    out = []
    for t in sorted(fam):
        g = partner[t]
        if t > g:
            continue
        phi = min(x for x in members[t] if eo[x] == shared[t])
        out.append((phi, g))
    return out


def _edge_has_vertex(fs: FlagSystem, edge: int, v: int, vo: np.ndarray, eo: np.ndarray) -> bool:
    s0 = fs.s0
    return int(vo[edge]) == v or int(vo[s0[edge]]) == v


def collapse(fs: FlagSystem, spec: CollapseSpec) -> FlagSystem:
    """Delete each pair of triangles ``(u,v,x)``, ``(u,v,w)`` and identify ``x`` with ``w``.

    Surviving flags keep their relative order.
    """
    return collapse_with_sites(fs, spec)[0]


def collapse_with_sites(fs: FlagSystem, spec: CollapseSpec) -> tuple[FlagSystem, list[int]]:
    """Collapse, also returning one site per pair such that
    :func:`uncollapse` on those sites restores ``fs`` up to isomorphism."""
    pairs = check_collapse(fs, spec)
    s0, s1, s2 = (p.copy() for p in fs.s)
    n = fs.n
    dead = np.zeros(n, dtype=bool)
    new2 = s2.copy()
    for phi, _ in pairs:
        psi = int(s2[phi])
        # walk both triangles with the same s0/s1 word
        a, b = phi, psi
        for i in range(6):
            dead[a] = dead[b] = True
            ga, gb = int(s2[a]), int(s2[b])
            if ga != b:
                new2[ga] = gb
                new2[gb] = ga
            a, b = (int(s0[a]), int(s0[b])) if i % 2 == 0 else (int(s1[a]), int(s1[b]))
        if a != phi or b != psi:
            raise PreconditionViolated("3", "collapsed face is not a triangle")
    keep = np.flatnonzero(~dead)
    pos = np.full(n, -1, dtype=_INT)
    pos[keep] = np.arange(keep.size)
    out = [pos[p[keep]] for p in (s0, s1, new2)]
    if any(np.any(o < 0) for o in out):
        raise PreconditionViolated("1", "an outer edge borders two collapsed triangles")
    # the flag outside (x, xu) in the first triangle of each pair
    sites = [int(pos[s2[s0[s1[phi]]]]) for phi, _ in pairs]
    return _checked(*out, stage="collapse"), sites


def collapse_candidates(fs: FlagSystem, face_orbits_of_aut: np.ndarray | None = None) -> list[CollapseSpec]:
    """Automorphism orbits of triangles that satisfy the collapsing preconditions.

    ``face_orbits_of_aut`` may give an automorphism-orbit label per flag;
    by default the full automorphism group is used.  Sorted by smallest flag.
    """
    if face_orbits_of_aut is None:
        from .symmetry import flag_orbits

        face_orbits_of_aut = flag_orbits(fs)
    sm = summarize(fs)
    fo = sm.face_orbits
    members = _face_members(fo)
    groups: dict[int, set[int]] = {}
    for t, fl in members.items():
        if len(fl) != 6:
            continue
        key = min(int(face_orbits_of_aut[x]) for x in fl)
        groups.setdefault(key, set()).add(t)
    out = []
    for key in sorted(groups, key=lambda k: min(groups[k])):
        spec = CollapseSpec(frozenset(groups[key]))
        try:
            check_collapse(fs, spec)
        except PreconditionViolated:
            continue
        out.append(spec)
    return out


# --- uncollapsing ----------------------------------------------------------------


def _e2_flag(s1: np.ndarray, s2: np.ndarray, phi: int) -> int:
    e = int(s1[phi])
    for _ in range(3):
        e = int(s1[s2[e]])
    return e


def site_partner(fs: FlagSystem, f: int) -> int:
    """The flag that names the same splitting site as ``f`` seen from the other side."""
    s1, s2 = fs.s1, fs.s2
    return int(s2[_e2_flag(s1, s2, f)])


def uncollapse(fs: FlagSystem, sites: Sequence[int]) -> FlagSystem:
    """Split a degree-8 vertex at each site into two, inserting a pair of triangles.

    A site is a flag ``phi = (y, e1, L1)``; ``e2`` is the edge four steps
    round ``y``.  The new triangles ``(x,a,b)`` and ``(w,a,b)`` share the new
    edge ``ab``, where ``a`` and ``b`` are the far ends of ``e1`` and ``e2``.
    New flags are appended after the old ones, twelve per site.
    """
    require_valid(fs)
    s0, s1, s2 = (p.tolist() for p in fs.s)
    n = fs.n
    m = len(sites)
    t0 = s0 + [0] * (12 * m)
    t1 = s1 + [0] * (12 * m)
    t2 = s2 + [0] * (12 * m)
    used: set[int] = set()
    for k, phi in enumerate(sites):
        phi = int(phi)
        e2 = _e2_flag(fs.s1, fs.s2, phi)
        base = n + 12 * k
        for off, pf, pe in ((0, phi, e2), (6, s2[phi], s2[e2])):
            F = [base + off + i for i in range(6)]
            for a, b in ((0, 1), (2, 3), (4, 5)):
                t0[F[a]], t0[F[b]] = F[b], F[a]
            for a, b in ((0, 5), (1, 2), (3, 4)):
                t1[F[a]], t1[F[b]] = F[b], F[a]
            for i, g in ((0, pf), (1, s0[pf]), (5, pe), (4, s0[pe])):
                if g in used:
                    raise PreconditionViolated("sites", f"flag {g + 1} is cut twice")
                used.add(g)
                t2[F[i]] = g
                t2[g] = F[i]
        for i in (2, 3):
            t2[base + i], t2[base + 6 + i] = base + 6 + i, base + i
    return _checked(t0, t1, t2, stage="uncollapse")


# --- belts ------------------------------------------------------------------


@dataclass(frozen=True)
class BeltSpec:
    """Faces not on belts, each named by its smallest flag; every other face lies on a belt."""

    non_belt_faces: frozenset[int]

    def belt_faces(self, fs: FlagSystem) -> frozenset[int]:
        fo = summarize(fs).face_orbits
        return frozenset(int(x) for x in np.unique(fo)) - self.non_belt_faces


def _rebelt_base(fs: FlagSystem, spec: BeltSpec) -> np.ndarray:
    sm = summarize(fs)
    if sm.schlafli != (3, 8):
        raise PreconditionViolated("belts", f"needs type {{3,8}}, got {sm.schlafli}")
    fo = sm.face_orbits
    nb = np.isin(fo, np.fromiter(spec.non_belt_faces, dtype=_INT, count=len(spec.non_belt_faces)))
    if not np.all(np.isin(list(spec.non_belt_faces), fo)):
        raise PreconditionViolated("belts", "non-belt face id is not a face")
    s2 = fs.s2
    if np.any(nb & nb[s2]):
        raise PreconditionViolated("belts", "two non-belt triangles share an edge")
    base = np.flatnonzero(~nb & nb[s2])
    # each belt triangle meets non-belt faces along exactly one edge
    per_face = np.bincount(fo[base], minlength=fs.n)
    belt = np.unique(fo[~nb])
    if np.any(per_face[belt] != 2):
        raise PreconditionViolated("belts", "a belt triangle does not have exactly one edge off the belt")
    # two non-belt triangles at every vertex, four steps apart
    vo = sm.vertex_orbits
    around = fs.word((1, 2))
    x = np.flatnonzero(nb)
    opposite = x.copy()
    for _ in range(4):
        opposite = around[opposite]
    if not np.all(nb[opposite]) or np.any(np.bincount(vo[x], minlength=fs.n)[np.unique(vo)] != 4):
        raise PreconditionViolated("belts", "vertices do not see two opposite non-belt triangles")
    return base


def rebelt(fs: FlagSystem, spec: BeltSpec) -> FlagSystem:
    """Replace every belt of a {3,8} map so that vertices get degree 9.

    Each belt triangle contributes its two flags on the edge it shares with
    a non-belt triangle; each of these flags becomes three new flags.
    """
    require_valid(fs)
    base = _rebelt_base(fs, spec)
    s0, s1, s2 = fs.s
    m = base.size
    pos = np.full(fs.n, -1, dtype=_INT)
    pos[base] = np.arange(m)
    A = pos[s1[s2[s1[s2[s1[base]]]]]]
    B = pos[s1[s0[s2[s1[base]]]]]
    C = pos[s2[s1[s2[base]]]]
    S0 = pos[s0[base]]
    if min(A.min(), B.min(), C.min(), S0.min()) < 0:
        raise PreconditionViolated("belts", "belt words leave the base flags")
    i = np.arange(m)
    t0 = np.empty(3 * m, dtype=_INT)
    t1 = np.empty(3 * m, dtype=_INT)
    t2 = np.empty(3 * m, dtype=_INT)
    t0[3 * i], t0[3 * i + 1], t0[3 * i + 2] = 3 * A, 3 * B + 2, 3 * B + 1
    t1[3 * i], t1[3 * i + 1], t1[3 * i + 2] = 3 * i + 1, 3 * i, 3 * S0 + 2
    t2[3 * i], t2[3 * i + 1], t2[3 * i + 2] = 3 * C, 3 * i + 2, 3 * i + 1
    return _checked(t0, t1, t2, stage="rebelt")


def belt_candidates(fs: FlagSystem, limit: int = 64) -> list[BeltSpec]:
    """Belt decompositions of a {3,8} map, found by choosing the opposite
    non-belt pair at an uncovered vertex and propagating.  Sorted by smallest flag."""
    sm = summarize(fs)
    if sm.schlafli != (3, 8):
        return []
    fo, vo = sm.face_orbits, sm.vertex_orbits
    around = fs.word((1, 2))
    # the eight flags ``(s1 s2)^k f`` at a vertex, one per face
    ring = [np.arange(fs.n)]
    for _ in range(7):
        ring.append(around[ring[-1]])
    ring_arr = np.stack(ring, axis=1)
    members = _face_members(fo)
    vertex_flag = {int(v): int(f) for f, v in reversed(list(enumerate(vo.tolist())))}
    vertices = sorted(vertex_flag)
    found: dict[frozenset[int], BeltSpec] = {}

    def extend(nb: set[int], belt: set[int]) -> bool:
        stack = list(nb)
        while stack:
            t = stack.pop()
            for x in members[t]:
                faces = [int(fo[y]) for y in ring_arr[x]]
                for j, g in enumerate(faces):
                    want_nb = j in (0, 4)
                    if want_nb:
                        if g in belt:
                            return False
                        if g not in nb:
                            nb.add(g)
                            stack.append(g)
                    else:
                        if g in nb:
                            return False
                        belt.add(g)
        return True

    def rec(nb: set[int], belt: set[int]) -> None:
        if len(found) >= limit:
            return
        covered = {int(vo[x]) for t in nb for x in members[t]}
        free = [v for v in vertices if v not in covered]
        if not free:
            spec = BeltSpec(frozenset(nb))
            try:
                _rebelt_base(fs, spec)
            except PreconditionViolated:
                return
            found.setdefault(spec.non_belt_faces, spec)
            return
        f = vertex_flag[free[0]]
        for j in range(4):
            start = int(fo[ring_arr[f, j]])
            nb2, belt2 = set(nb), set(belt)
            if start in belt2:
                continue
            nb2.add(start)
            if extend(nb2, belt2):
                rec(nb2, belt2)

    rec(set(), set())
    return sorted(found.values(), key=lambda s: min(s.non_belt_faces))


def unrebelt(fs: FlagSystem, marking: EdgeMarking) -> FlagSystem:
    """Undo rebelting on a {3,9} map whose belts are determined by the marked edges.

    Every flag ``psi`` on a marked edge becomes the four flags
    ``4*pos(psi) + j`` for ``j = 0..3``; base flags are taken in ascending order.
    """
    require_valid(fs)
    sm = summarize(fs)
    if sm.schlafli != (3, 9):
        raise PreconditionViolated("belts", f"needs type {{3,9}}, got {sm.schlafli}")
    base = marking.flags(fs)
    s0, s1, s2 = fs.s
    m = base.size
    pos = np.full(fs.n, -1, dtype=_INT)
    pos[base] = np.arange(m)
    R = pos[s1[s2[s1[s2[s1[base]]]]]]
    W = pos[s1[s0[s2[s1[base]]]]]
    S2 = pos[s2[base]]
    if min(R.min(), W.min(), S2.min()) < 0:
        raise PreconditionViolated("belts", "marked edges do not form belts")
    i = np.arange(m)
    t0 = np.empty(4 * m, dtype=_INT)
    t1 = np.empty(4 * m, dtype=_INT)
    t2 = np.empty(4 * m, dtype=_INT)
    t0[4 * i], t0[4 * i + 1], t0[4 * i + 2], t0[4 * i + 3] = 4 * R, 4 * i + 2, 4 * i + 1, 4 * R + 3
    t1[4 * i], t1[4 * i + 1], t1[4 * i + 2], t1[4 * i + 3] = 4 * i + 1, 4 * i, 4 * R + 2, 4 * S2 + 3
    t2[4 * i], t2[4 * i + 1], t2[4 * i + 2], t2[4 * i + 3] = 4 * i + 3, 4 * W + 2, 4 * W + 1, 4 * i
    return _checked(t0, t1, t2, stage="unrebelt")


def transport_unrebelt(p: np.ndarray, base: np.ndarray) -> np.ndarray:
    """The permutation of unrebelted flags induced by a permutation ``p`` that preserves ``base``."""
    pos = np.full(len(p), -1, dtype=_INT)
    pos[base] = np.arange(base.size)
    img = pos[np.asarray(p)[base]]
    return (4 * img[:, None] + np.arange(4)).reshape(-1)
