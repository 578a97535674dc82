from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from flagmaps.atlas import run_pipeline
from flagmaps.errors import InvalidFlagSystem, PreconditionViolated
from flagmaps.flagcore import are_isomorphic, summarize
from flagmaps.operations import (
    BeltSpec,
    CollapseSpec,
    EdgeMarking,
    belt_candidates,
    check_collapse,
    collapse,
    collapse_candidates,
    collapse_with_sites,
    dual,
    petrial,
    rebelt,
    site_partner,
    transport_truncate,
    transport_unrebelt,
    truncate,
    uncollapse,
    unrebelt,
    untruncate,
    untruncations,
)
from flagmaps.symmetry import automorphisms
from strategies import flag_systems

PROPS = settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.filter_too_much, HealthCheck.too_slow, HealthCheck.function_scoped_fixture])


@pytest.fixture(scope="module")
def d6(d6_seed):
    return run_pipeline(d6_seed)


def test_dual_of_cube_is_octahedron(cube):
    s = summarize(dual(cube))
    assert (s.v, s.e, s.f, s.schlafli) == (6, 12, 8, (3, 4))


def test_petrial_of_cube(cube):
    s = summarize(petrial(cube))
    assert (s.v, s.e, s.f, s.chi, s.schlafli) == (8, 12, 4, 0, (6, 3))


def test_truncated_tetrahedron(tetrahedron):
    tr, inh = truncate(tetrahedron)
    s = summarize(tr)
    assert (s.v, s.e, s.f, s.chi) == (12, 18, 8, 2)
    assert sorted(s.face_sizes) == [3] * 4 + [6] * 4
    assert len(inh) == 6
    assert automorphisms(tr).order == 24


def test_cube_is_a_truncated_hosohedron(cube):
    pre = list(untruncations(cube))
    assert pre
    for m in pre:
        assert summarize(m).schlafli in ((2, 4), (4, 2))
        assert are_isomorphic(truncate(m)[0], cube) is not None


def test_untruncate_rejects(tetrahedron, cube):
    assert untruncate(tetrahedron) is None
    assert untruncate(dual(cube)) is None


def test_inherited_marking(tetrahedron):
    tr, inh = truncate(tetrahedron)
    flags = inh.flags(tr)
    assert flags.size == tetrahedron.n
    assert np.array_equal(flags, 3 * np.arange(tetrahedron.n))
    eo = summarize(tr).edge_orbits
    not_an_id = int(np.flatnonzero(eo != np.arange(tr.n))[0])
    with pytest.raises(PreconditionViolated):
        EdgeMarking(frozenset({not_an_id})).check(tr)


@PROPS
@given(flag_systems(), st.data())
def test_operations_commute_with_relabelling(fs, data):
    perm = np.array(data.draw(st.permutations(range(fs.n))))
    g = fs.relabel(perm)
    assert dual(g) == dual(fs).relabel(perm)
    assert truncate(g)[0] == truncate(fs)[0].relabel(transport_truncate(perm))
    try:
        pe = petrial(fs)
    except InvalidFlagSystem:
        return
    assert petrial(g) == pe.relabel(perm)
    assert petrial(pe) == fs


@PROPS
@given(flag_systems(max_edges=6))
def test_truncation_counts(fs):
    tr, inh = truncate(fs)
    a, b = summarize(fs), summarize(tr)
    assert (b.v, b.e, b.f) == (2 * a.e, a.e + 2 * a.e, a.f + a.v)
    assert len(inh) == a.e
    assert set(b.vertex_degrees) == {3}
    k, kt = automorphisms(fs).orbit_count, automorphisms(tr).orbit_count
    assert 2 * kt in (2 * k, 3 * k, 6 * k)
    assert any(are_isomorphic(u, fs) is not None for u in untruncations(tr))


def test_collapse_preconditions(d6):
    final = d6.finals[0].fs
    spec = collapse_candidates(final)[0]
    one = CollapseSpec(frozenset({min(spec.triangles)}))
    with pytest.raises(PreconditionViolated) as exc:
        check_collapse(final, one)
    assert exc.value.item == "2"
    m3 = d6.stage("M3").fs
    with pytest.raises(PreconditionViolated) as exc:
        check_collapse(m3, CollapseSpec(frozenset({1})))
    assert exc.value.item == "3"


def test_collapse_deltas(d6):
    final = d6.finals[0].fs
    for spec in collapse_candidates(final):
        k = len(check_collapse(final, spec))
        a, b = summarize(final), summarize(collapse(final, spec))
        assert (b.v - a.v, b.e - a.e, b.f - a.f) == (-k, -3 * k, -2 * k)
        assert b.chi == a.chi


def test_site_partner_is_an_involution(d6):
    m3 = d6.stage("M3").fs
    for f in range(m3.n):
        assert site_partner(m3, site_partner(m3, f)) == f


def test_uncollapse_rejects_overlapping_sites(d6):
    m3 = d6.stage("M3").fs
    with pytest.raises(PreconditionViolated):
        uncollapse(m3, [0, 0])


@PROPS
@given(st.data())
def test_collapse_round_trip_relabelled(d6, data):
    final = d6.finals[0].fs
    perm = data.draw(st.permutations(range(final.n)))
    g = final.relabel(perm)
    specs = collapse_candidates(g)
    assert specs
    m3, sites = collapse_with_sites(g, specs[0])
    assert are_isomorphic(m3, d6.stage("M3").fs) is not None
    assert are_isomorphic(uncollapse(m3, sites), final) is not None


def test_rebelt_requires_type(cube):
    with pytest.raises(PreconditionViolated):
        rebelt(cube, BeltSpec(frozenset()))
    assert belt_candidates(cube) == []


def test_rebelt_rejects_bad_belts(d6):
    m3 = d6.stage("M3").fs
    with pytest.raises(PreconditionViolated):
        rebelt(m3, BeltSpec(frozenset()))


def test_rebelt_unrebelt_round_trip(d6):
    du, m3 = d6.stage("Du"), d6.stage("M3").fs
    assert are_isomorphic(unrebelt(du.fs, du.marking), m3) is not None
    cands = belt_candidates(m3)
    assert cands
    assert any(are_isomorphic(rebelt(m3, b), du.fs) is not None for b in cands)
    for b in cands:
        s = summarize(rebelt(m3, b))
        assert s.schlafli == (3, 9) and s.chi == summarize(m3).chi


def test_unrebelt_requires_type(cube, d6):
    with pytest.raises(PreconditionViolated):
        unrebelt(cube, EdgeMarking(frozenset()))
    m3 = d6.stage("M3").fs
    with pytest.raises(PreconditionViolated):
        unrebelt(m3, d6.stage("Du").marking)


@PROPS
@given(st.data())
def test_unrebelt_commutes_with_relabelling(d6, data):
    du = d6.stage("Du")
    base = du.marking.flags(du.fs)
    perm = np.array(data.draw(st.permutations(range(du.fs.n))))
    g = du.fs.relabel(perm)
    marking = EdgeMarking.from_flags(g, perm[base])
    got = unrebelt(g, marking)
    assert are_isomorphic(got, unrebelt(du.fs, du.marking)) is not None


def test_transport_unrebelt_for_automorphisms(d6):
    du = d6.stage("Du")
    base = du.marking.flags(du.fs)
    m3 = unrebelt(du.fs, du.marking)
    for a in automorphisms(du.fs).elements[:8]:
        if not np.array_equal(np.sort(a[base]), base):
            continue
        q = transport_unrebelt(a, base)
        assert m3.relabel(q) == m3
