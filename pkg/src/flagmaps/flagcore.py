"""Flag systems: maps on closed surfaces as three involutions on a flag set.

Flags are numbered ``0..n-1`` in memory; the text formats add one on the way
out and subtract one on the way in.  ``s[i][f]`` is the flag ``i``-adjacent
to ``f``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidFlagSystem

__all__ = [
    "FlagSystem",
    "MapSummary",
    "validate",
    "require_valid",
    "orbit_labels",
    "summarize",
    "petrie_lengths",
    "zigzag2",
    "zigzag2_lengths",
    "cycle_lengths",
    "canonical_code",
    "map_code",
    "are_isomorphic",
    "CanonicalForm",
    "canonical_form",
]

_INT = np.int64


def _as_perm(a: Iterable[int]) -> np.ndarray:
    arr = np.array(list(a) if not isinstance(a, np.ndarray) else a, dtype=_INT)
    arr = arr.reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FlagSystem:
    s0: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        for name in ("s0", "s1", "s2"):
            object.__setattr__(self, name, _as_perm(getattr(self, name)))

    @property
    def n(self) -> int:
        return int(self.s0.shape[0])

    @property
    def s(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.s0, self.s1, self.s2)

    @classmethod
    def from_one_based(cls, s0: Sequence[int], s1: Sequence[int], s2: Sequence[int]) -> "FlagSystem":
        return cls(*(np.asarray(x, dtype=_INT) - 1 for x in (s0, s1, s2)))

    def one_based(self) -> tuple[list[int], list[int], list[int]]:
        return tuple((p + 1).tolist() for p in self.s)  # type: ignore[return-value]

    def relabel(self, perm: Sequence[int]) -> "FlagSystem":
        """Rename flag ``f`` to ``perm[f]``."""
        perm = np.asarray(perm, dtype=_INT)
        out = []
        for p in self.s:
            q = np.empty_like(p)
            q[perm] = perm[p]
            out.append(q)
        return FlagSystem(*out)

    def word(self, letters: Sequence[int]) -> np.ndarray:
        """Permutation applying ``s[letters[0]]`` first, then the next letter, and so on."""
        q = np.arange(self.n, dtype=_INT)
        for i in letters:
            q = self.s[i][q]
        return q

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FlagSystem):
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.s, other.s))

    def __hash__(self) -> int:
        return hash(tuple(p.tobytes() for p in self.s))


def orbit_labels(n: int, perms: Sequence[np.ndarray]) -> np.ndarray:
    """Label each point by the smallest point of its orbit under ``perms``."""
    lab = np.arange(n, dtype=_INT)
    if n == 0:
        return lab
    while True:
        new = lab
        for p in perms:
            new = np.minimum(new, new[p])
        new = new[new]
        if np.array_equal(new, lab):
            return lab
        lab = new


def _count(labels: np.ndarray) -> int:
    return int(np.unique(labels).size)


def validate(fs: FlagSystem, allow_multi_edges: bool = False) -> list[str]:
    """Return the identifiers of all violated flag-system invariants.

    Identifiers: ``empty``, ``length``, ``range``, ``not-involution``,
    ``involution-fixed-point``, ``multi-edge``, ``edge-square``, ``disconnected``.
    """
    s = fs.s
    n = s[0].shape[0]
    if n == 0:
        return ["empty"]
    if any(p.shape[0] != n for p in s):
        return ["length"]
    if any(p.min() < 0 or p.max() >= n for p in s):
        return ["range"]
    out: list[str] = []
    ident = np.arange(n)
    if any(not np.array_equal(p[p], ident) for p in s):
        out.append("not-involution")
    if any(np.any(p == ident) for p in s):
        out.append("involution-fixed-point")
    if not allow_multi_edges:
        if np.any(s[0] == s[1]) or np.any(s[1] == s[2]) or np.any(s[0] == s[2]):
            out.append("multi-edge")
    if not np.array_equal(s[0][s[2]], s[2][s[0]]):
        out.append("edge-square")
    if _count(orbit_labels(n, s)) != 1:
        out.append("disconnected")
    return out


def require_valid(fs: FlagSystem, allow_multi_edges: bool = False) -> None:
    key = ("valid", allow_multi_edges)
    if fs._cache.get(key):
        return
    bad = validate(fs, allow_multi_edges)
    if bad:
        raise InvalidFlagSystem(bad)
    fs._cache[key] = True


def _sizes(labels: np.ndarray) -> list[int]:
    _, counts = np.unique(labels, return_counts=True)
    return counts.tolist()


@dataclass(frozen=True)
class MapSummary:
    n: int
    vertex_orbits: np.ndarray
    edge_orbits: np.ndarray
    face_orbits: np.ndarray
    v: int
    e: int
    f: int
    chi: int
    orientable: bool
    face_sizes: tuple[int, ...]
    vertex_degrees: tuple[int, ...]

    @property
    def schlafli(self) -> tuple[int, int] | None:
        if len(set(self.face_sizes)) == 1 and len(set(self.vertex_degrees)) == 1:
            return (self.face_sizes[0], self.vertex_degrees[0])
        return None

    def as_dict(self) -> dict:
        return {
            "flags": self.n,
            "v": self.v,
            "e": self.e,
            "f": self.f,
            "chi": self.chi,
            "orientable": self.orientable,
            "schlafli": self.schlafli,
        }


def is_orientable(fs: FlagSystem) -> bool:
    """True iff the flag graph is bipartite (even words split flags in two)."""
    s0, s1, s2 = fs.s
    even = orbit_labels(fs.n, [s1[s0], s2[s1]])
    return _count(even) == 2


def summarize(fs: FlagSystem) -> MapSummary:
    cached = fs._cache.get("summary")
    if cached is not None:
        return cached
    require_valid(fs, allow_multi_edges=True)
    s0, s1, s2 = fs.s
    n = fs.n
    vo = orbit_labels(n, [s1, s2])
    eo = orbit_labels(n, [s0, s2])
    fo = orbit_labels(n, [s0, s1])
    v, e, f = _count(vo), _count(eo), _count(fo)
    out = MapSummary(
        n=n,
        vertex_orbits=vo,
        edge_orbits=eo,
        face_orbits=fo,
        v=v,
        e=e,
        f=f,
        chi=v - e + f,
        orientable=is_orientable(fs),
        face_sizes=tuple(sorted(c // 2 for c in _sizes(fo))),
        vertex_degrees=tuple(sorted(c // 2 for c in _sizes(vo))),
    )
    fs._cache["summary"] = out
    return out


def petrie_lengths(fs: FlagSystem) -> list[int]:
    """Lengths of the Petrie polygons, one entry per polygon, ascending."""
    require_valid(fs, allow_multi_edges=True)
    s0, s1, s2 = fs.s
    lab = orbit_labels(fs.n, [s0[s2], s1])
    return sorted(c // 2 for c in _sizes(lab))


def zigzag2(fs: FlagSystem) -> np.ndarray:
    """The permutation z = s0 (s1 s2)^2, with s2 acting first."""
    return fs.word((2, 1, 2, 1, 0))


def cycle_lengths(p: np.ndarray) -> list[int]:
    """Cycle type of a permutation as an ascending list."""
    return sorted(_sizes(orbit_labels(p.shape[0], [p])))


def zigzag2_lengths(fs: FlagSystem) -> list[int]:
    require_valid(fs, allow_multi_edges=True)
    return cycle_lengths(zigzag2(fs))


# --- canonical forms -------------------------------------------------------

# Words whose cycle lengths seed the colour refinement.  Every flag of a
# vertex-transitive triangulation looks alike to face and vertex sizes, so
# longer words are needed to split flags early.
_SEED_WORDS = (
    (0, 1),
    (1, 2),
    (0, 2, 1),
    (0, 1, 2),
    (2, 1, 2, 1, 0),
    (2, 1, 2, 1, 2, 1, 0),
    (0, 1, 0, 2),
    (1, 0, 1, 2),
)
_CYCLE_CAP = 64
_CHUNK = 384


def _point_cycle_length(p: np.ndarray, cap: int = _CYCLE_CAP) -> np.ndarray:
    n = p.shape[0]
    ident = np.arange(n)
    out = np.zeros(n, dtype=_INT)
    q = p.copy()
    for k in range(1, cap + 1):
        hit = (q == ident) & (out == 0)
        out[hit] = k
        if not np.any(out == 0):
            break
        q = p[q]
    return out


def _rank_rows(rows: np.ndarray) -> np.ndarray:
    _, inv = np.unique(rows, axis=0, return_inverse=True)
    return np.asarray(inv, dtype=_INT).reshape(-1)


def refined_colors(fs: FlagSystem) -> np.ndarray:
    """Isomorphism-invariant colouring of flags (stable colour refinement)."""
    cached = fs._cache.get("colors")
    if cached is not None:
        return cached
    s0, s1, s2 = fs.s
    seeds = np.stack([_point_cycle_length(fs.word(w)) for w in _SEED_WORDS], axis=1)
    c = _rank_rows(seeds)
    k = int(c.max()) + 1
    while True:
        nc = _rank_rows(np.stack([c, c[s0], c[s1], c[s2]], axis=1))
        nk = int(nc.max()) + 1
        c = nc
        if nk == k:
            break
        k = nk
    fs._cache["colors"] = c
    return c


def _lockstep(s: tuple[np.ndarray, ...], n: int, roots: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Breadth-first numbering from every root at once, keeping only the
    roots whose encoding is lexicographically smallest so far."""
    c = roots.shape[0]
    num = np.full((c, n), -1, dtype=np.int32)
    order = np.zeros((c, n), dtype=np.int32)
    alive = np.arange(c)
    num[alive, roots] = 0
    order[:, 0] = roots
    code = np.empty(3 * n, dtype=np.int32)
    nxt = 1
    for t in range(n):
        if t >= nxt:
            raise InvalidFlagSystem(["disconnected"])
        x = order[alive, t]
        for i in range(3):
            y = s[i][x]
            val = num[alive, y]
            val = np.where(val < 0, nxt, val)
            m = int(val.min())
            keep = val == m
            if not keep.all():
                alive = alive[keep]
                x = x[keep]
                y = y[keep]
            code[3 * t + i] = m
            if m == nxt:
                num[alive, y] = nxt
                order[alive, nxt] = y
                nxt += 1
    return code, order[alive]


@dataclass(frozen=True)
class CanonicalForm:
    code: bytes
    # Breadth-first orders attaining the minimum; row r lists flags by
    # canonical position.  Any two rows differ by an automorphism.
    orders: np.ndarray

    @property
    def base_order(self) -> np.ndarray:
        return self.orders[0]


def canonical_form(fs: FlagSystem) -> CanonicalForm:
    cached = fs._cache.get("canon")
    if cached is not None:
        return cached
    require_valid(fs, allow_multi_edges=True)
    colors = refined_colors(fs)
    counts = np.bincount(colors)
    size = counts.min()
    cls = int(np.flatnonzero(counts == size)[0])
    cand = np.flatnonzero(colors == cls)
    s = tuple(p.astype(np.int64) for p in fs.s)
    best: np.ndarray | None = None
    orders: list[np.ndarray] = []
    for lo in range(0, cand.size, _CHUNK):
        code, ords = _lockstep(s, fs.n, cand[lo : lo + _CHUNK])
        if best is None:
            best, orders = code, [ords]
            continue
        diff = np.flatnonzero(code != best)
        if diff.size == 0:
            orders.append(ords)
        elif code[diff[0]] < best[diff[0]]:
            best, orders = code, [ords]
    assert best is not None
    header = np.array([fs.n, cls, int(size)], dtype="<u4").tobytes()
    colour_key = np.array(_colour_profile(colors), dtype="<u4").tobytes()
    form = CanonicalForm(
        code=header + colour_key + best.astype("<u4").tobytes(),
        orders=np.concatenate(orders, axis=0),
    )
    fs._cache["canon"] = form
    return form


def _colour_profile(colors: np.ndarray) -> list[int]:
    return np.bincount(colors).tolist()


def canonical_code(fs: FlagSystem) -> bytes:
    """Byte string equal for two flag systems iff they are isomorphic."""
    return canonical_form(fs).code


def map_code(fs: FlagSystem) -> str:
    """Sixteen hex characters identifying the isomorphism class."""
    return hashlib.sha256(canonical_code(fs)).hexdigest()[:16]


def are_isomorphic(a: FlagSystem, b: FlagSystem) -> np.ndarray | None:
    """A colour-preserving bijection ``phi`` with ``phi[a.s_i[f]] == b.s_i[phi[f]]``, or None."""
    if a.n != b.n:
        return None
    ca, cb = canonical_form(a), canonical_form(b)
    if ca.code != cb.code:
        return None
    phi = np.empty(a.n, dtype=_INT)
    phi[ca.base_order] = cb.base_order
    return phi
