"""Permutation groups, seed generating sets and the 2-orbit map builders.

Permutations are tuples of images on ``0..d-1``.  Products act on the
right: ``mul(a, b)`` applies ``a`` first and then ``b``.  In the builders,
right multiplication gives the flag adjacencies and left multiplication
gives automorphisms.
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateAdjacency, InvalidSeed, OrderCapExceeded
from .flagcore import FlagSystem, validate

Perm = tuple[int, ...]

DEFAULT_ORDER_CAP = 10000


# --- permutations ----------------------------------------------------------

_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, degree: int | None = None) -> Perm:
    """Parse 1-indexed cycle notation such as ``(1,2)(3,4,5)``; ``()`` is the identity."""
    text = text.strip()
    if re.sub(r"\s", "", _CYCLE.sub("", text)):
        raise ValueError(f"not cycle notation: {text!r}")
    cycles = []
    for body in _CYCLE.findall(text):
        body = body.strip()
        if not body:
            continue
        pts = [int(t) - 1 for t in body.split(",")]
        if min(pts) < 0 or len(set(pts)) != len(pts):
            raise ValueError(f"bad cycle ({body})")
        cycles.append(pts)
    top = max((max(c) + 1 for c in cycles), default=1)
    d = max(top, degree or 0)
    img = list(range(d))
    seen: set[int] = set()
    for c in cycles:
        if seen & set(c):
            raise ValueError("cycles are not disjoint")
        seen |= set(c)
        for i, x in enumerate(c):
            img[x] = c[(i + 1) % len(c)]
    return tuple(img)


def format_cycles(p: Perm) -> str:
    seen = [False] * len(p)
    parts = []
    for s in range(len(p)):
        if seen[s] or p[s] == s:
            continue
        cyc = [s]
        seen[s] = True
        x = p[s]
        while x != s:
            cyc.append(x)
            seen[x] = True
            x = p[x]
        parts.append("(" + ",".join(str(c + 1) for c in cyc) + ")")
    return "".join(parts) or "()"


def pad(p: Perm, d: int) -> Perm:
    return tuple(p) + tuple(range(len(p), d))


def mul(a: Perm, b: Perm) -> Perm:
    return tuple(b[x] for x in a)


def inverse(p: Perm) -> Perm:
    q = [0] * len(p)
    for i, x in enumerate(p):
        q[x] = i
    return tuple(q)


def identity(d: int) -> Perm:
    return tuple(range(d))


def power(p: Perm, k: int) -> Perm:
    out = identity(len(p))
    base = p if k >= 0 else inverse(p)
    for _ in range(abs(k)):
        out = mul(out, base)
    return out


def perm_order(p: Perm) -> int:
    x, k = p, 1
    e = identity(len(p))
    while x != e:
        x = mul(x, p)
        k += 1
    return k


def is_involution(p: Perm) -> bool:
    return p != identity(len(p)) and mul(p, p) == identity(len(p))


# --- groups ----------------------------------------------------------------


@dataclass(frozen=True)
class PermGroup:
    degree: int
    generators: tuple[Perm, ...]
    elements: tuple[Perm, ...]
    index: dict = field(repr=False, compare=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def right_table(self, g: Perm) -> np.ndarray:
        """``t[i]`` is the index of ``elements[i] * g``."""
        return np.array([self.index[mul(a, g)] for a in self.elements], dtype=np.int64)

    def left_table(self, g: Perm) -> np.ndarray:
        """``t[i]`` is the index of ``g * elements[i]``."""
        return np.array([self.index[mul(g, a)] for a in self.elements], dtype=np.int64)

    def is_abelian(self) -> bool:
        return all(mul(a, b) == mul(b, a) for a in self.generators for b in self.generators)

    def order_spectrum(self) -> tuple[tuple[int, int], ...]:
        counts: dict[int, int] = {}
        for a in self.elements:
            o = perm_order(a)
            counts[o] = counts.get(o, 0) + 1
        return tuple(sorted(counts.items()))


def closure(generators: Sequence[Perm], cap: int = DEFAULT_ORDER_CAP) -> PermGroup:
    """Breadth-first closure under right multiplication by the generators."""
    gens = list(generators)
    d = max((len(g) for g in gens), default=1)
    gens = [pad(g, d) for g in gens]
    e = identity(d)
    elements = [e]
    index = {e: 0}
    queue = deque([e])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = mul(x, g)
            if y not in index:
                if len(elements) >= cap:
                    raise OrderCapExceeded(f"group order exceeds {cap}")
                index[y] = len(elements)
                elements.append(y)
                queue.append(y)
    return PermGroup(d, tuple(gens), tuple(elements), index)


# --- seeds -----------------------------------------------------------------


@dataclass(frozen=True)
class SeedEntry:
    name: str
    chi: int
    cls: str  # "2_01" or "2_0"
    rho0: Perm
    rho1: Perm | None = None
    rho212: Perm | None = None
    sigma12: Perm | None = None
    expect: int | None = None
    note: str = ""

    @property
    def generators(self) -> tuple[Perm, ...]:
        if self.cls == "2_01":
            return (self.rho0, self.rho1, self.rho212)  # type: ignore[return-value]
        return (self.rho0, self.sigma12)  # type: ignore[return-value]

    def padded(self) -> "SeedEntry":
        d = max(len(g) for g in self.generators)
        kw = {k: (pad(getattr(self, k), d) if getattr(self, k) is not None else None) for k in ("rho0", "rho1", "rho212", "sigma12")}
        return SeedEntry(self.name, self.chi, self.cls, expect=self.expect, note=self.note, **kw)

    def group(self) -> PermGroup:
        return closure(self.padded().generators)


def seed_problems(seed: SeedEntry) -> list[str]:
    """Reasons a seed is unusable; empty when it satisfies every rule."""
    if seed.cls not in ("2_01", "2_0"):
        return [f"unknown class {seed.cls!r}"]
    if any(g is None for g in seed.generators):
        return ["missing generator"]
    s = seed.padded()
    d = len(s.rho0)
    e = identity(d)
    out = []
    if s.cls == "2_01":
        if not all(is_involution(g) for g in s.generators):
            out.append("generators must be involutions")
        t = mul(mul(s.rho0, s.rho1), s.rho212)  # type: ignore[arg-type]
        if power(t, 3) != e:
            out.append("(rho0 rho1 rho212)^3 != 1")
    else:
        if not is_involution(s.rho0):
            out.append("rho0 must be an involution")
        if s.sigma12 == e or mul(s.sigma12, s.sigma12) == e:  # type: ignore[arg-type]
            out.append("sigma12 must not be an involution")
        t = mul(s.rho0, power(s.sigma12, 2))  # type: ignore[arg-type]
        if power(t, 3) != e:
            out.append("(rho0 sigma12^2)^3 != 1")
    try:
        g = s.group()
    except OrderCapExceeded as exc:
        out.append(str(exc))
        return out
    if g.order != -6 * seed.chi:
        out.append(f"group order {g.order} != -6*chi = {-6 * seed.chi}")
    return out


def check_seed(seed: SeedEntry, check_order: bool = True) -> None:
    bad = seed_problems(seed)
    if not check_order:
        bad = [b for b in bad if not b.startswith("group order")]
    if bad:
        raise InvalidSeed(f"{seed.name}: " + "; ".join(bad))


@dataclass(frozen=True)
class SeedMap:
    """A seed map together with the left action of its group.

    Flag ``i`` is ``(elements[i], A)`` and flag ``N + i`` is ``(elements[i], B)``.
    """

    fs: FlagSystem
    group: PermGroup
    actions: tuple[np.ndarray, ...]  # one flag permutation per group generator
    part: np.ndarray  # 0 for part A, 1 for part B


def _left_actions(g: PermGroup) -> tuple[np.ndarray, ...]:
    out = []
    for gen in g.generators:
        t = g.left_table(gen)
        out.append(np.concatenate([t, t + g.order]))
    return tuple(out)


def _finish(s0, s1, s2, g: PermGroup) -> SeedMap:
    fs = FlagSystem(s0, s1, s2)
    bad = validate(fs)
    if bad:
        raise DegenerateAdjacency(", ".join(bad))
    n = g.order
    part = np.concatenate([np.zeros(n, dtype=np.int64), np.ones(n, dtype=np.int64)])
    return SeedMap(fs, g, _left_actions(g), part)


def seed_map_2_01(seed: SeedEntry, check_order: bool = False) -> SeedMap:
    if seed.cls != "2_01":
        raise InvalidSeed(f"{seed.name}: not a 2_01 seed")
    check_seed(seed, check_order)
    s = seed.padded()
    g = s.group()
    n = g.order
    r0, r1, r212 = (g.right_table(x) for x in (s.rho0, s.rho1, s.rho212))
    s0 = np.concatenate([r0, r0 + n])
    s1 = np.concatenate([r1, r212 + n])
    s2 = np.concatenate([np.arange(n) + n, np.arange(n)])
    return _finish(s0, s1, s2, g)


def seed_map_2_0(seed: SeedEntry, check_order: bool = False) -> SeedMap:
    if seed.cls != "2_0":
        raise InvalidSeed(f"{seed.name}: not a 2_0 seed")
    check_seed(seed, check_order)
    s = seed.padded()
    g = s.group()
    n = g.order
    sig, r0 = s.sigma12, s.rho0
    conj = mul(mul(sig, r0), inverse(sig))  # type: ignore[arg-type]
    s0 = np.concatenate([g.right_table(r0), g.right_table(conj) + n])
    s1 = np.concatenate([np.arange(n) + n, np.arange(n)])
    s2 = np.concatenate([g.right_table(inverse(sig)) + n, g.right_table(sig)])  # type: ignore[arg-type]
    return _finish(s0, s1, s2, g)


def seed_map(seed: SeedEntry, check_order: bool = False) -> SeedMap:
    return seed_map_2_01(seed, check_order) if seed.cls == "2_01" else seed_map_2_0(seed, check_order)


def build_map_2_01(seed: SeedEntry) -> FlagSystem:
    return seed_map_2_01(seed).fs


def build_map_2_0(seed: SeedEntry) -> FlagSystem:
    return seed_map_2_0(seed).fs


def build_regular(r0: Perm, r1: Perm, r2: Perm) -> FlagSystem:
    """Flags are the group elements; ``s_i`` is right multiplication by ``r_i``."""
    g = closure([r0, r1, r2])
    return FlagSystem(*(g.right_table(pad(r, g.degree)) for r in (r0, r1, r2)))


# --- generating sets ---------------------------------------------------------


def _generates(g: PermGroup, gens: Iterable[Perm]) -> bool:
    try:
        return closure(list(gens), cap=g.order).order == g.order
    except OrderCapExceeded:
        return False


def search_gensets(
    g: PermGroup, cls: str, chi: int | None = None, name: str = "gen", skip_degenerate: bool = True
) -> list[SeedEntry]:
    """Every admissible generating set of ``g`` for the class, in element order.

    ``2_01``: ordered triples of involutions with (r0 r1 r212)^3 = 1.
    ``2_0``: involution r0 and non-involution s with (r0 s^2)^3 = 1.
    With ``skip_degenerate``, sets giving a degenerate flag system are dropped.
    """
    if cls not in ("2_01", "2_0"):
        raise ValueError(f"unknown class {cls!r}")
    e = identity(g.degree)
    chi = -g.order // 6 if chi is None else chi
    invs = [a for a in g.elements if is_involution(a)]
    out: list[SeedEntry] = []
    if cls == "2_01":
        for a, b, c in itertools.product(invs, repeat=3):
            if len({a, b, c}) < 3:
                continue
            if power(mul(mul(a, b), c), 3) != e:
                continue
            if not _generates(g, (a, b, c)):
                continue
            out.append(SeedEntry(f"{name}{len(out) + 1}", chi, "2_01", rho0=a, rho1=b, rho212=c))
    else:
        others = [s for s in g.elements if s != e and not is_involution(s)]
        for a in invs:
            for s in others:
                if power(mul(a, mul(s, s)), 3) != e:
                    continue
                if not _generates(g, (a, s)):
                    continue
                out.append(SeedEntry(f"{name}{len(out) + 1}", chi, "2_0", rho0=a, sigma12=s))
    if not skip_degenerate:
        return out
    usable = []
    for seed in out:
        try:
            seed_map(seed)
        except (DegenerateAdjacency, InvalidSeed):
            continue
        usable.append(seed)
    return usable


def extends_to_automorphism(g: PermGroup, src: Sequence[Perm], dst: Sequence[Perm]) -> bool:
    """Whether ``src[i] -> dst[i]`` extends to an automorphism of ``g`` (``src`` generates ``g``)."""
    d = g.degree
    src = [pad(x, d) for x in src]
    dst = [pad(x, d) for x in dst]
    e = identity(d)
    image = {e: e}
    queue = deque([e])
    while queue:
        x = queue.popleft()
        for a, b in zip(src, dst):
            y = mul(x, a)
            z = mul(image[x], b)
            if y in image:
                if image[y] != z:
                    return False
            else:
                image[y] = z
                queue.append(y)
    return len(image) == g.order and len(set(image.values())) == g.order


def genset_symmetry_count(seed: SeedEntry) -> int:
    """Number of the six permutations of (rho0, rho1, rho212) that extend to automorphisms."""
    if seed.cls != "2_01":
        raise InvalidSeed(f"{seed.name}: symmetry count needs a 2_01 seed")
    s = seed.padded()
    g = s.group()
    gens = s.generators
    return sum(extends_to_automorphism(g, gens, [gens[i] for i in perm]) for perm in itertools.permutations(range(3)))


def role_variants(seed: SeedEntry) -> list[SeedEntry]:
    """The three 2_01 seeds obtained by letting each involution play rho0."""
    if seed.cls != "2_01":
        return [seed]
    a, b, c = seed.generators
    triples = [(a, b, c), (b, c, a), (c, a, b)]
    return [
        SeedEntry(f"{seed.name}/{i}", seed.chi, "2_01", rho0=x, rho1=y, rho212=z, note=seed.note)
        for i, (x, y, z) in enumerate(triples)
    ]
