from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pnta.lemmalab import GenParams, random_spec
from pnta.model import (
    Atom,
    ConjunctiveGuard,
    conj,
    NetworkSpec,
    NonConvexInvariant,
    Not,
    Or,
    Template,
    Transition,
    max_constants,
    normalize_constraints,
    scale_to_integers,
    validate_network,
)
from pnta.semantics import DiscreteEngine, Network


def one(states=("a", "b"), trans=(), invariants=None, clocks=("c",), constants=None):
    t = Template("T", states, states[0], clocks, tuple(trans), invariants or {})
    return NetworkSpec((t,), constants or {})


def codes(spec):
    return [d.code for d in validate_network(spec)]


def test_reduced_fischer_is_valid(reduced):
    assert validate_network(reduced) == []
    (p,) = reduced.templates
    assert len(p.states) == 4 and p.clocks == ("c",)


def test_missing_initial_in_allowed_set():
    tr = Transition("a", "b", cguard=ConjunctiveGuard.of({"T": {"b"}}))
    assert codes(one(trans=[tr])) == ["initial-missing"]


def test_initial_invariant_must_be_true():
    spec = one(invariants={"a": Atom("c", "<=", 2)})
    assert codes(spec) == ["initial-invariant"]


def test_dangling_names():
    spec = one(trans=[Transition("a", "zz", Atom("d", "<=", "K"))])
    assert set(codes(spec)) == {"unknown-state", "unknown-clock", "unknown-constant"}
    assert codes(NetworkSpec(())) == ["no-templates"]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10_000))
def test_mutations_are_detected(seed):
    spec = random_spec(GenParams(seed=seed))
    assert validate_network(spec) == []
    t = spec.templates[0]
    guarded = [k for k, tr in enumerate(t.transitions) if not tr.cguard.trivial]
    if not guarded:
        return
    k = guarded[0]
    tr = t.transitions[k]
    name, allowed = tr.cguard.allowed[0]
    target = spec.template(name)
    broken = ConjunctiveGuard.of({**tr.cguard.as_dict(), name: set(allowed) - {target.initial} or {"nowhere"}})
    trans = list(t.transitions)
    trans[k] = Transition(tr.source, tr.target, tr.guard, tr.resets, broken)
    bad = NetworkSpec((Template(t.name, t.states, t.initial, t.clocks, tuple(trans), t.invariants),)
                      + spec.templates[1:], spec.constants)
    assert "initial-missing" in codes(bad)


@pytest.mark.parametrize("consts, scale, expect", [
    ({"p": Fraction(3, 2), "q": Fraction(1)}, 2, {"p": 3, "q": 2}),
    ({"p": Fraction(1), "q": Fraction(4)}, 1, {"p": 1, "q": 4}),
    ({"p": Fraction(1, 3), "q": Fraction(1, 2)}, 6, {"p": 2, "q": 3}),
])
def test_scale_to_integers(consts, scale, expect):
    spec = one(trans=[Transition("a", "b", conj([Atom("c", ">=", "p"), Atom("c", "<=", "q")]))],
               constants=consts)
    out = scale_to_integers(spec)
    assert out.scale == scale
    assert {k: v for k, v in out.constants.items()} == expect


def test_normalize_splits_disjunction():
    g = Or((Atom("c", "<=", 2), Atom("c", ">=", 5)))
    out = normalize_constraints(one(trans=[Transition("a", "b", g)]))
    guards = sorted(str(tr.guard) for tr in out.templates[0].transitions)
    assert guards == ["c <= 2", "c >= 5"]


def test_normalize_pushes_negation():
    out = normalize_constraints(one(trans=[Transition("a", "b", Not(Atom("c", "<", 1)))]))
    assert str(out.templates[0].transitions[0].guard) == "c >= 1"


def test_nonconvex_invariant_rejected():
    inv = Or((Atom("c", "<=", 1), Atom("d", "<=", 1)))
    with pytest.raises(NonConvexInvariant):
        normalize_constraints(one(clocks=("c", "d"), invariants={"b": inv}))


def test_max_constants(reduced):
    assert max_constants(reduced) == {"P": {"c": 2}}
    spec = one(clocks=("c", "u"), trans=[Transition("a", "b", conj([Atom("c", ">", 3), Atom("c", "<=", 7)]))])
    assert max_constants(spec) == {"T": {"c": 7, "u": 0}}


def _successor_sets(spec, sizes):
    net = Network(spec, sizes)
    eng = DiscreteEngine(net, reduce_inactive=False)
    seen, frontier, edges = set(), [n for n, _ in eng.initial()], set()
    while frontier:
        node = frontier.pop()
        if node in seen:
            continue
        seen.add(node)
        for _label, nxt, _entry in eng.successors(node):
            edges.add((node, nxt))
            frontier.append(nxt)
    return edges


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_normalize_preserves_transition_relation(seed):
    spec = random_spec(GenParams(seed=seed, max_clocks=2))
    assert _successor_sets(spec, (1, 1)) == _successor_sets(normalize_constraints(spec), (1, 1))
