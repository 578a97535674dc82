from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings

import oracle
from flagmaps.atlas import run_pipeline
from flagmaps.errors import LabelingMismatch
from flagmaps.groups import seed_map
from flagmaps.symmetry import (
    admissible_labeling,
    admissible_labelings,
    automorphisms,
    flag_orbits,
    quotient_graph,
    reference_type_graphs,
    symmetry_class,
    type_graph,
)
from flagmaps.typegraphs import isomorphic
from strategies import flag_systems

PROPS = settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.filter_too_much, HealthCheck.too_slow])


def test_regular_maps(tetrahedron, cube):
    for fs in (tetrahedron, cube):
        assert str(symmetry_class(fs)) == "regular"
        assert type_graph(fs).k == 1


@pytest.mark.parametrize("name, cls, semi", [("chi26c1", "2_0", [0, 0]), ("chi2a1", "2_01", [0, 0, 1, 1])])
def test_two_orbit_seeds(seeds_by_name, name, cls, semi):
    fs = seed_map(seeds_by_name[name]).fs
    sc = symmetry_class(fs)
    assert sc.orbits == 2 and str(sc) == cls
    assert sorted(c for c, _ in type_graph(fs).semi_edges()) == semi


def test_admissible_seeds_may_be_regular(seeds_by_name):
    # admissibility only asks for the labelling; chi2b1 has more symmetry
    assert str(symmetry_class(seed_map(seeds_by_name["chi2b1"]).fs)) == "regular"


def test_final_classes(seeds_by_name):
    res = run_pipeline(seeds_by_name["chi2b1"])
    names = sorted(str(f.symmetry) for f in res.finals)
    assert names == ["14-orbit C", "14-orbit C", "14-orbit D", "14-orbit D"]
    refs = reference_type_graphs()
    for f in res.finals:
        assert isomorphic(type_graph(f.fs), refs[f.symmetry.detail])


def test_orbits_are_smallest_flags(cube):
    orb = flag_orbits(cube)
    assert np.all(orb == 0)


@PROPS
@given(flag_systems(max_edges=8))
def test_orbits_match_oracle(fs):
    s = tuple(p.tolist() for p in fs.s)
    auts = oracle.automorphisms(s)
    want = {min(c) for c in oracle.orbits(fs.n, auts)}
    orb = flag_orbits(fs)
    assert set(orb.tolist()) == want
    for a in auts:
        assert np.array_equal(orb[a], orb)


@PROPS
@given(flag_systems(max_edges=8))
def test_type_graph_is_consistent(fs):
    tg = type_graph(fs)
    assert tg.k == fs.n // automorphisms(fs).order
    orb = flag_orbits(fs)
    values = sorted(set(orb.tolist()))
    idx = {v: i for i, v in enumerate(values)}
    for c, p in enumerate(fs.s):
        for f in range(fs.n):
            assert tg.nbr[c][idx[int(orb[f])]] == idx[int(orb[p[f]])]
    lab = admissible_labeling(fs, tg)
    assert lab is not None


def test_quotient_graph_mismatch(cube):
    labels = np.arange(cube.n) % 2
    with pytest.raises(LabelingMismatch):
        quotient_graph(cube, labels)


def test_admissible_labelings_of_d6_m3(d6_seed):
    res = run_pipeline(d6_seed)
    m3 = res.stage("M3").fs
    tg, _ = quotient_graph(m3, res.labels)
    labs = list(admissible_labelings(m3, tg))
    # M3 is regular, so every start label propagates
    assert len(labs) == tg.k
    assert any(np.array_equal(l_, np.searchsorted(sorted(set(res.labels.tolist())), res.labels)) for l_ in labs)


def test_type_graphs_pass_divisibility():
    from flagmaps.flagcore import FlagSystem, summarize
    from flagmaps.typegraphs import check_edge_shapes, check_lemma_divisibility

    checked = 0
    for s in oracle.all_flag_systems(16):
        fs = FlagSystem(*s)
        sch = summarize(fs).schlafli
        tg = type_graph(fs)
        assert check_edge_shapes(tg)
        if sch is not None:
            assert check_lemma_divisibility(tg, *sch)
            checked += 1
    assert checked > 50
