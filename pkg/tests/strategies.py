"""Hypothesis strategies for flag systems."""

from __future__ import annotations

from hypothesis import assume
from hypothesis import strategies as st

import oracle
from flagmaps.flagcore import FlagSystem


@st.composite
def flag_systems(draw, max_edges=10):
    """A random valid flag system on 4e flags, relabelled at random."""
    e = draw(st.integers(1, max_edges))
    n = 4 * e
    s0 = [x ^ 1 for x in range(n)]
    s2 = [x ^ 2 for x in range(n)]
    order = draw(st.permutations(range(n)))
    s1 = [-1] * n
    free = list(order)
    while free:
        x = free.pop()
        opts = [y for y in free if y not in (s0[x], s2[x])]
        assume(opts)
        y = opts[draw(st.integers(0, len(opts) - 1))]
        free.remove(y)
        s1[x], s1[y] = y, x
    s = (s0, s1, s2)
    assume(oracle.is_valid(s))
    perm = draw(st.permutations(range(n)))
    return FlagSystem(s0, s1, s2).relabel(perm)
