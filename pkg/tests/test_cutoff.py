import itertools

import pytest

from pnta.cutoff import compute_cutoff, cutoff_values, enumerate_sizes, instantiable_minimum, parameterized_check
from pnta.logic import QUANTIFIERS, Property, SAtom
from pnta.model import NetworkSpec, Template


def expected(counts, q, indexed):
    # written out independently of the implementation
    table = {
        "E": lambda n, ix: 2 * n + 1 if ix else 2 * n,
        "A": lambda n, ix: 2 * n + 1 if ix else 2 * n,
        "Einf": lambda n, ix: 2 if ix else 1,
        "Ainf": lambda n, ix: 2 if ix else 1,
        "Efin": lambda n, ix: 1,
        "Afin": lambda n, ix: 1,
    }[q]
    return tuple(table(n, l in indexed) for l, n in enumerate(counts))


def chain(name, n):
    states = tuple(f"q{k}" for k in range(n))
    return Template(name, states, "q0", (), ())


def prop_over(q, templates, op="F"):
    binders = tuple((f"i{k}", t) for k, t in enumerate(templates))
    return Property(binders, q, op, SAtom("q0", "i0", templates[0]) if templates else SAtom("q0", 1, 0))


@pytest.mark.parametrize("q", QUANTIFIERS)
def test_table_exhaustive(q):
    for k in (1, 2, 3):
        names = [f"T{l}" for l in range(k)]
        for counts in itertools.product(range(1, 11), repeat=k):
            tmpls = [chain(n, c) for n, c in zip(names, counts)]
            for r in range(1, k + 1):
                for idx in itertools.combinations(range(k), r):
                    op = "F" if q.endswith("fin") else "G"
                    p = prop_over(q, [names[l] for l in idx], op)
                    cut = compute_cutoff(tmpls, p)
                    assert cut.values == expected(counts, q, set(idx)), (q, counts, idx)


def test_examples():
    assert cutoff_values((4,), "E", {0}) == (9,)
    assert cutoff_values((4, 3), "A", {0}) == (9, 6)
    assert cutoff_values((4, 3, 2), "Efin", {1}) == (1, 1, 1)
    assert cutoff_values((4, 3), "Einf", {1}) == (1, 2)


def test_provenance_mentions_rule():
    t = [chain("P", 4)]
    text = compute_cutoff(t, prop_over("A", ["P"], "G")).provenance()
    assert "cutoff: (9)" in text and "indexed" in text


def test_enumerate_sizes():
    t = [chain("P", 1), chain("Q", 1)]
    p = prop_over("E", ["P"])
    sizes = enumerate_sizes(compute_cutoff(t, p), p)
    assert [tuple(s) for s in sizes] == [(a, b) for a in (1, 2, 3) for b in (0, 1, 2)]


def test_cutoff_below_instantiability():
    t = [chain("P", 2)]
    p = Property((("i", "P"), ("j", "P")), "Einf", "F", SAtom("q0", "i", "P"),
                 distinct=frozenset({frozenset({"i", "j"})}))
    p3 = Property((("i", "P"), ("j", "P"), ("k", "P")), "Efin", "F", SAtom("q0", "i", "P"),
                  distinct=frozenset({frozenset({"i", "j"}), frozenset({"j", "k"}), frozenset({"i", "k"})}))
    assert instantiable_minimum(p, "P") == 2
    assert [tuple(s) for s in enumerate_sizes(compute_cutoff(t, p), p)] == [(2,)]
    assert [tuple(s) for s in enumerate_sizes(compute_cutoff(t, p3), p3)] == [(3,)]


def test_unknown_template():
    with pytest.raises(KeyError):
        compute_cutoff([chain("P", 2)], prop_over("E", ["Q"]))


def test_parameterized_check_small(reduced, prop):
    pv = parameterized_check(reduced, prop("forall i:P . A F[>=0] CS_mypid(i)"), fail_fast=True)
    assert not pv.truth and tuple(pv.witness_sizes) == (1,)
    pv = parameterized_check(reduced, prop("forall i:P . Einf F[>=0] CS_mypid(i)"))
    assert pv.truth and [tuple(s) for s in pv.table] == [(1,), (2,)]


def test_spec_type_accepted():
    spec = NetworkSpec((chain("P", 3),))
    assert tuple(compute_cutoff(spec, prop_over("E", ["P"]))) == (7,)
