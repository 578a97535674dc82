"""Type graphs: 3-edge-coloured semi-graphs, their shape checks and enumeration.

A type graph on ``k`` vertices is stored as three involutions ``nbr[i]`` of
``range(k)``; a fixed point ``nbr[i][x] == x`` is a semi-edge of colour ``i``
at ``x``.  ``G_i`` is the graph with the colour-``i`` edges deleted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import MalformedTypeGraph

__all__ = [
    "TypeGraph",
    "Component",
    "components",
    "check_lemma_divisibility",
    "check_edge_shapes",
    "is_bipartite",
    "is_vertex_transitive",
    "canonical_code",
    "isomorphic",
    "enumerate_type_graphs",
]


@dataclass(frozen=True)
class TypeGraph:
    k: int
    nbr: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]

    def __post_init__(self) -> None:
        if self.k < 1 or len(self.nbr) != 3:
            raise MalformedTypeGraph("need k >= 1 and three colours")
        for i, p in enumerate(self.nbr):
            if len(p) != self.k or sorted(p) != list(range(self.k)):
                raise MalformedTypeGraph(f"colour {i} is not a permutation of the vertices")
            if any(p[p[x]] != x for x in range(self.k)):
                raise MalformedTypeGraph(f"colour {i} is not a matching")

    @classmethod
    def from_edges(cls, k: int, edges: Sequence[Sequence[tuple[int, int]]]) -> "TypeGraph":
        """Build from per-colour lists of pairs; ``(x, x)`` is a semi-edge."""
        nbr = []
        for i, pairs in enumerate(edges):
            p = [-1] * k
            for a, b in pairs:
                if not (0 <= a < k and 0 <= b < k) or p[a] != -1 or p[b] != -1:
                    raise MalformedTypeGraph(f"colour {i}: bad or repeated incidence at {a}-{b}")
                p[a], p[b] = b, a
            if -1 in p:
                raise MalformedTypeGraph(f"colour {i}: vertex {p.index(-1)} has no edge")
            nbr.append(tuple(p))
        return cls(k, tuple(nbr))  # type: ignore[arg-type]

    def edges(self, i: int) -> list[tuple[int, int]]:
        p = self.nbr[i]
        return [(x, p[x]) for x in range(self.k) if x <= p[x]]

    def semi_edges(self) -> list[tuple[int, int]]:
        return [(i, x) for i in range(3) for x in range(self.k) if self.nbr[i][x] == x]

    def relabel(self, perm: Sequence[int]) -> "TypeGraph":
        nbr = []
        for p in self.nbr:
            q = [0] * self.k
            for x in range(self.k):
                q[perm[x]] = perm[p[x]]
            nbr.append(tuple(q))
        return TypeGraph(self.k, tuple(nbr))  # type: ignore[arg-type]


@dataclass(frozen=True)
class Component:
    vertices: tuple[int, ...]
    is_path: bool

    @property
    def size(self) -> int:
        return len(self.vertices)


def components(tg: TypeGraph, deleted: int) -> list[Component]:
    """Connected components of ``G_deleted``; a component with a semi-edge is a path."""
    cols = [c for c in range(3) if c != deleted]
    seen = [False] * tg.k
    out = []
    for start in range(tg.k):
        if seen[start]:
            continue
        stack, comp, path = [start], [], False
        seen[start] = True
        while stack:
            x = stack.pop()
            comp.append(x)
            for c in cols:
                y = tg.nbr[c][x]
                if y == x:
                    path = True
                elif not seen[y]:
                    seen[y] = True
                    stack.append(y)
        out.append(Component(tuple(sorted(comp)), path))
    return out


def _divides_ok(comps: list[Component], m: int) -> bool:
    for c in comps:
        bound = m if c.is_path else 2 * m
        if bound % c.size:
            return False
    return True


def check_lemma_divisibility(tg: TypeGraph, p: int, q: int) -> bool:
    """Faces (``G_2``) need size | p on paths and size | 2p on cycles; vertices (``G_0``) likewise with q."""
    return _divides_ok(components(tg, 2), p) and _divides_ok(components(tg, 0), q)


def check_edge_shapes(tg: TypeGraph) -> bool:
    """Components of ``G_1`` are quotients of the alternating 4-cycle, i.e. colours 0 and 2 commute."""
    a, b = tg.nbr[0], tg.nbr[2]
    return all(a[b[x]] == b[a[x]] for x in range(tg.k))


def is_connected(tg: TypeGraph, colours: Sequence[int] = (0, 1, 2)) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for c in colours:
            y = tg.nbr[c][x]
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == tg.k


def is_vertex_transitive(tg: TypeGraph) -> bool:
    """Maps of this type have one vertex orbit iff ``G_0`` is connected."""
    return is_connected(tg, (1, 2))


def is_bipartite(tg: TypeGraph) -> bool:
    if tg.semi_edges():
        return False
    side = [-1] * tg.k
    for start in range(tg.k):
        if side[start] >= 0:
            continue
        side[start] = 0
        stack = [start]
        while stack:
            x = stack.pop()
            for c in range(3):
                y = tg.nbr[c][x]
                if side[y] < 0:
                    side[y] = 1 - side[x]
                    stack.append(y)
                elif side[y] == side[x]:
                    return False
    return True


def _bfs_code(tg: TypeGraph, root: int) -> tuple[tuple[int, ...], list[int]]:
    num = {root: 0}
    order = [root]
    code: list[int] = []
    t = 0
    while t < len(order):
        x = order[t]
        t += 1
        for c in range(3):
            y = tg.nbr[c][x]
            if y not in num:
                num[y] = len(order)
                order.append(y)
            code.append(num[y])
    return tuple(code), order


def canonical_code(tg: TypeGraph) -> tuple:
    """Equal for two type graphs iff they are colour-isomorphic."""
    parts = []
    seen: set[int] = set()
    for start in range(tg.k):
        if start in seen:
            continue
        best = None
        _, comp = _bfs_code(tg, start)
        seen.update(comp)
        for r in comp:
            code, _ = _bfs_code(tg, r)
            if best is None or code < best:
                best = code
        parts.append((len(comp), best))
    return tuple(sorted(parts))


def isomorphic(a: TypeGraph, b: TypeGraph) -> bool:
    return a.k == b.k and canonical_code(a) == canonical_code(b)


# --- enumeration -----------------------------------------------------------


def _g0_shapes(size: int, q: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Colour-1/colour-2 involutions on ``size`` vertices forming one allowed ``G_0`` component."""
    out = []
    if q % size == 0:
        # alternating path 0-1-...-(size-1); both colour orders
        for first in (1, 2):
            if size == 1 and first == 2:
                continue
            c = {1: list(range(size)), 2: list(range(size))}
            col = first
            for j in range(size - 1):
                c[col][j], c[col][j + 1] = j + 1, j
                col = 3 - col
            out.append((tuple(c[1]), tuple(c[2])))
    if size % 2 == 0 and (2 * q) % size == 0:
        c = {1: list(range(size)), 2: list(range(size))}
        for j in range(size):
            col = 1 if j % 2 == 0 else 2
            c[col][j], c[col][(j + 1) % size] = (j + 1) % size, j
        out.append((tuple(c[1]), tuple(c[2])))
    return out


def _partitions(k: int, allowed: list[int], maxpart: int | None = None) -> Iterator[list[int]]:
    if k == 0:
        yield []
        return
    for s in sorted(allowed, reverse=True):
        if s <= k and (maxpart is None or s <= maxpart):
            for rest in _partitions(k - s, allowed, s):
                yield [s] + rest


def _g0_layouts(k: int, q: int, vertex_transitive: bool) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    if vertex_transitive:
        yield from _g0_shapes(k, q)
        return
    allowed = [s for s in range(1, k + 1) if _g0_shapes(s, q)]
    for parts in _partitions(k, allowed):
        yield from _combine(parts, q)


def _combine(parts: list[int], q: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    if not parts:
        yield ((), ())
        return
    head, rest = parts[0], parts[1:]
    for a1, a2 in _g0_shapes(head, q):
        for b1, b2 in _combine(rest, q):
            yield (a1 + tuple(x + head for x in b1), a2 + tuple(x + head for x in b2))


def _face_ok(c0: list[int], c1: tuple[int, ...], start: int, p: int) -> bool:
    """Check the colour-0/1 component through ``start`` against the face rule, as far as it is known."""
    seen = {start}
    stack = [start]
    closed, path = True, False
    while stack:
        x = stack.pop()
        for y in (c0[x], c1[x]):
            if y == -1:
                closed = False
            elif y == x:
                path = True
            elif y not in seen:
                seen.add(y)
                stack.append(y)
    size = len(seen)
    bound = p if path else 2 * p
    if closed:
        return bound % size == 0
    return size <= bound


def _colour0_choices(k: int, c1: tuple[int, ...], c2: tuple[int, ...], p: int) -> Iterator[list[int]]:
    """Involutions commuting with ``c2`` whose face components respect ``p``."""
    c0 = [-1] * k

    def assign(pairs: list[tuple[int, int]]) -> list[int] | None:
        done: list[int] = []
        queue = list(pairs)
        while queue:
            v, w = queue.pop()
            if c0[v] == w and c0[w] == v:
                continue
            if c0[v] != -1 or c0[w] != -1:
                for x in done:
                    c0[x] = -1
                return None
            c0[v] = w
            c0[w] = v
            done.extend({v, w})
            queue.append((c2[v], c2[w]))
        if not all(_face_ok(c0, c1, x, p) for x in done):
            for x in done:
                c0[x] = -1
            return None
        return done

    def rec() -> Iterator[list[int]]:
        try:
            v = c0.index(-1)
        except ValueError:
            yield list(c0)
            return
        for w in range(v, k):
            if c0[w] != -1:
                continue
            done = assign([(v, w)])
            if done is None:
                continue
            yield from rec()
            for x in done:
                c0[x] = -1

    yield from rec()


def enumerate_type_graphs(p: int, q: int, k: int, vertex_transitive: bool = False, cap: int = 30) -> list[TypeGraph]:
    """All connected type graphs on ``k`` vertices admissible for Schläfli type {p, q}.

    Admissible means: colours 0 and 2 commute (edge components are quotients
    of a 4-cycle), face components obey the divisibility rule with ``p`` and
    vertex components with ``q``.  With ``vertex_transitive`` the graph
    ``G_0`` must be connected.  Results are up to colour-isomorphism, sorted
    by canonical code.
    """
    if p < 2 or q < 2 or k < 1:
        raise ValueError("need p, q >= 2 and k >= 1")
    if k > cap:
        raise ValueError(f"k={k} exceeds the enumeration cap {cap}")
    found: dict[tuple, TypeGraph] = {}
    for c1, c2 in _g0_layouts(k, q, vertex_transitive):
        for c0 in _colour0_choices(k, c1, c2, p):
            tg = TypeGraph(k, (tuple(c0), c1, c2))
            if not _divides_ok(components(tg, 2), p):
                continue
            if not is_connected(tg):
                continue
            code = canonical_code(tg)
            found.setdefault(code, tg)
    return [found[c] for c in sorted(found)]
