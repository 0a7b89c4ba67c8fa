import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import corpus
from pnta import search
from pnta.lemmalab import random_spec
from pnta.model import Atom, Diag, NetworkSpec, Template, Transition, close_strict_constraints
from pnta.semantics import DiscreteEngine, Network
from pnta.zones.dbm import DiagonalUnsupported
from pnta.zones.engine import ZoneEngine, zone_successors


def reachable_vectors(engine):
    g = search.explore(engine, keep_edges=False)
    return {engine.states(n) for n in g.nodes}


def test_fischer_initial_successors(reduced):
    net = Network(reduced, (2,))
    eng = ZoneEngine(net)
    (node, _), = eng.initial()
    succ = zone_successors(node, eng)
    dis = DiscreteEngine(Network(close_strict_constraints(reduced), (2,)))
    (dnode, _), = dis.initial()
    expect = sorted(n[0] for lab, n, _ in dis.successors(dnode) if lab[0] == "sync")
    assert sorted(n[0] for n in succ) == expect == [(0, 1), (1, 0)]


def test_all_guards_false():
    t = Template("T", ("a", "b"), "a", ("c",), (Transition("a", "b", Atom("c", "<", 0)),))
    eng = ZoneEngine(Network(NetworkSpec((t,)), (1,)))
    (node, _), = eng.initial()
    assert zone_successors(node, eng) == []


def test_diagonals_rejected():
    t = Template("T", ("a", "b"), "a", ("c", "d"), (Transition("a", "b", Diag("c", "<=", "d")),))
    with pytest.raises(DiagonalUnsupported):
        ZoneEngine(Network(NetworkSpec((t,)), (1,)))


def test_successor_count_is_permutation_invariant(reduced):
    net = Network(reduced, (3,))
    eng = ZoneEngine(net)
    g = search.explore(eng, keep_edges=False)
    by_states = {}
    for node in g.nodes:
        by_states.setdefault(node[0], []).append(len(zone_successors(node, eng)))
    for states, counts in by_states.items():
        for perm in itertools.permutations(states):
            if perm in by_states:
                assert sorted(by_states[perm]) == sorted(counts)


def test_symmetry_keeps_reachable_orbits(reduced):
    net = Network(reduced, (4,))
    full = reachable_vectors(ZoneEngine(net))
    reduced_ = reachable_vectors(ZoneEngine(net, pinned=set()))
    assert {tuple(sorted(v)) for v in full} == {tuple(sorted(v)) for v in reduced_}
    pinned = reachable_vectors(ZoneEngine(net, pinned={0}))
    assert {(v[0],) + tuple(sorted(v[1:])) for v in full} == {(v[0],) + tuple(sorted(v[1:])) for v in pinned}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_zone_reachability_matches_digitization(seed):
    spec, sizes, _ = corpus.case(seed)
    net = Network(spec, sizes)
    assert reachable_vectors(ZoneEngine(net)) == reachable_vectors(DiscreteEngine(net))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_subsumption_keeps_reachable_states(seed):
    spec, sizes, _ = corpus.case(seed)
    eng = ZoneEngine(Network(spec, sizes))
    plain = search.explore(eng, keep_edges=False)
    cut = search.explore(eng, keep_edges=False, subsume=eng.cover())
    assert {n[0] for n in plain.nodes} == {n[0] for n in cut.nodes}
    assert len(cut) <= len(plain)
