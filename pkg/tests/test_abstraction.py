import pytest

from pnta.abstraction import (
    DIFF,
    MYPID,
    IncompleteBinding,
    InitialTagged,
    TaggedTemplate,
    VarBinding,
    abstract_spec,
    add_mutex_guards,
    pid_view_template,
    product,
    prune_unreachable,
    simulation_check,
    tag_exclusion,
    tagged_states,
)
from pnta.model import ConjunctiveGuard, NetworkSpec, Template, Transition, validate_network


@pytest.fixture(scope="module")
def tagged(proc):
    P = proc.templates[0]
    return product(P, VarBinding.from_template(P, "v"))


def test_view_template():
    w = pid_view_template()
    assert w.states == (DIFF, MYPID)
    assert {(t.source, t.target) for t in w.transitions} >= {(DIFF, DIFF), (MYPID, MYPID)}


def test_product_size(tagged):
    assert len(tagged.template.states) == 8
    assert len(tagged.tags) == 4
    assert tagged.template.initial == "Init_diff"


def test_mutex_guard_on_write(tagged, proc):
    t = add_mutex_guards(tagged)
    (tr,) = [tr for tr in t.transitions if (tr.source, tr.target) == ("b1_diff", "b2_mypid")]
    allowed = dict(tr.cguard.allowed)["P"]
    assert allowed == frozenset(s for s in t.states if not s.endswith("_mypid"))
    assert not validate_network(NetworkSpec((t,), proc.constants))


def test_pruning_matches_shipped(tagged, proc, full, reduced):
    pruned = prune_unreachable(add_mutex_guards(tagged))
    assert len(pruned.states) == 5
    assert "b2_diff" in pruned.states
    assert set(pruned.states) - {"b2_diff"} == set(reduced.templates[0].states)
    assert abstract_spec(proc, "P", "v").templates == full.templates


@pytest.mark.parametrize("n", [2, 3])
def test_simulation(proc, full, n):
    res = simulation_check(proc, full, n)
    assert res.holds, res.step
    assert res.explored > 0


def test_simulation_detects_broken_guard(proc, full):
    (t,) = full.templates
    # forbid peers in diff states as well: real runs now have no abstract match
    trans = tuple(
        tr if tr.cguard.trivial else tr.__class__(tr.source, tr.target, tr.guard, tr.resets,
                                                  ConjunctiveGuard.of({"P": ["Init_diff"]}))
        for tr in t.transitions
    )
    mutant = NetworkSpec((Template(t.name, t.states, t.initial, t.clocks, trans, t.invariants),), full.constants)
    res = simulation_check(proc, mutant, 2)
    assert not res.holds and res.step


@pytest.mark.parametrize("n", [2, 3, 4])
def test_tag_exclusion(reduced, n):
    assert tag_exclusion(reduced, (n,)).truth


def test_tag_exclusion_fails_without_guards(tagged):
    t = prune_unreachable(tagged.template)
    assert tagged_states(t)
    assert not tag_exclusion(NetworkSpec((t,), {"k": 2}), (2,)).truth


def test_incomplete_binding(proc):
    P = proc.templates[0]
    b = VarBinding.from_template(P, "v")
    partial = VarBinding("v", {k: ops for k, ops in b.annotations.items() if k != 1})
    with pytest.raises(IncompleteBinding):
        product(P, partial)


def test_initial_tagged():
    t = Template("Q", ("a_mypid", "a_diff"), "a_mypid", (), (Transition("a_mypid", "a_diff"),))
    with pytest.raises(InitialTagged):
        add_mutex_guards(TaggedTemplate(t, frozenset({"a_mypid"})))


def test_second_user_of_variable_rejected(proc):
    (P,) = proc.templates
    twin = NetworkSpec((P, Template("Q", P.states, P.initial, P.clocks, P.transitions, P.invariants)),
                       proc.constants, proc.variables)
    with pytest.raises(ValueError, match="only one template"):
        abstract_spec(twin, "P", "v")
