"""DBM algebra: spec examples plus point-sampling oracles."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pnta.model import Atom, Diag, conj
from pnta.zones import kernel
from pnta.zones.dbm import (
    DBM,
    INF,
    DiagonalUnsupported,
    dbm_canonicalize,
    dbm_extrapolate,
    dbm_from_constraint,
    dbm_intersect,
    dbm_reset,
    dbm_up,
)

XY = ["x", "y"]


def zone(*atoms, names=XY, diag=()):
    d = dbm_from_constraint(conj(list(atoms)), names)
    for i, j, b in diag:
        d = d.constrain(i, j, b)
    return d


def test_canonicalize_derives_bound():
    # x <= 2 and y - x <= 1 give y <= 3
    d = zone(Atom("x", "<=", 2), diag=[(2, 1, (1, 1))])
    assert d.upper(2) == (3, 1)
    assert dbm_canonicalize(d) == d


def test_contradiction_is_empty():
    assert zone(Atom("x", "<=", 1), Atom("x", ">=", 2)).is_empty()


def test_up_from_origin_keeps_equality():
    d = dbm_up(DBM.zero(2, XY))
    assert d.upper(1) == INF and d.m[1][2] == (0, 1) and d.m[2][1] == (0, 1)
    assert dbm_up(d) == d


def test_up_preserves_differences():
    d = dbm_up(DBM.from_point([1, 0], XY)).canonical()
    assert d.m[1][2] == (1, 1) and d.m[2][1] == (-1, 1) and d.upper(2) == INF


def test_reset():
    d = dbm_up(DBM.from_point([1, 0], XY)).canonical()
    r = dbm_reset(d, ["y"]).canonical()
    assert r.upper(2) == (0, 1) and r.lower(1) == (1, 1)
    assert dbm_reset(d, []) == d
    assert dbm_reset(d, ["x", "y"]).canonical() == DBM.zero(2, XY)


def test_intersect():
    d = dbm_intersect(DBM.universe(1, ["x"]), Atom("x", ">", 2))
    assert d.lower(1) == (2, 0)
    assert dbm_intersect(zone(Atom("x", "<=", 1), names=["x"]), Atom("x", ">=", 2)).is_empty()
    # the Fischer exit guard c > k with k = 2
    d = dbm_intersect(DBM.universe(1, ["c"]), Atom("c", ">", "k"), {"k": Fraction(2)})
    assert d.contains([Fraction(5, 2)]) and not d.contains([2])
    with pytest.raises(DiagonalUnsupported):
        dbm_intersect(DBM.universe(2, XY), Diag("x", "<=", "y"))


def test_extrapolate():
    d = zone(Atom("x", "<=", 7), names=["x"])
    assert dbm_extrapolate(d, {"x": 2}).upper(1) == INF
    d = zone(Atom("x", "<=", 2), names=["x"])
    assert dbm_extrapolate(d, {"x": 2}) == d
    d = zone(Atom("x", ">=", 5), names=["x"])
    assert dbm_extrapolate(d, {"x": 2}).lower(1) == (2, 0)


# -- oracles -----------------------------------------------------------------

ops = st.sampled_from(["<", "<=", "==", ">=", ">"])
atoms = st.tuples(st.sampled_from(XY), ops, st.integers(0, 4)).map(lambda t: Atom(*t))
diffs = st.tuples(st.sampled_from([(1, 2), (2, 1)]), st.integers(-3, 3), st.booleans())
points = st.lists(st.fractions(0, 6, max_denominator=4), min_size=2, max_size=2)


def direct(atoms_, diag, point):
    vals = {"x": point[0], "y": point[1]}
    for a in atoms_:
        lhs, rhs = vals[a.clock], a.value
        if not {"<": lhs < rhs, "<=": lhs <= rhs, "==": lhs == rhs, ">=": lhs >= rhs, ">": lhs > rhs}[a.op]:
            return False
    full = [Fraction(0)] + list(point)
    for (i, j), v, le in diag:
        d = full[i] - full[j]
        if d > v or (d == v and not le):
            return False
    return True


@settings(max_examples=300, deadline=None)
@given(st.lists(atoms, max_size=4), st.lists(diffs, max_size=2), points)
def test_membership_matches_atoms(atoms_, diag, point):
    d = zone(*atoms_, diag=[(i, j, (v, int(le))) for (i, j), v, le in diag])
    assert d.contains(point) == direct(atoms_, diag, point)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(-3, 5), st.booleans()), max_size=6),
       st.randoms(use_true_random=False))
def test_canonical_is_idempotent_and_order_free(rows, rnd):
    rows = [(i, j, (v, int(le))) for i, j, v, le in rows if i != j]
    d = DBM.universe(2, XY).tighten(rows)
    # negative cycles keep shrinking, so only emptiness is stable there
    assert d.canonical().is_empty() if d.is_empty() else d.canonical() == d
    shuffled = rows[:]
    rnd.shuffle(shuffled)
    e = DBM.universe(2, XY)
    for r in shuffled:
        e = e.tighten([r])
    assert e.is_empty() == d.is_empty()
    if not d.is_empty():
        assert e == d


def to_kernel(d: DBM) -> np.ndarray:
    n = d.n + 1
    out = np.empty((n, n), dtype=kernel.DTYPE)
    for i in range(n):
        for j in range(n):
            v, le = d.m[i][j]
            out[i, j] = kernel.INF if v == math.inf else kernel.pack(int(v), bool(le))
    return out


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(-3, 5), st.booleans()), max_size=6),
       st.lists(st.integers(0, 4), min_size=2, max_size=2), st.sets(st.sampled_from([1, 2])))
def test_kernel_agrees_with_exact_dbm(rows, bounds, resets):
    rows = [(i, j, (v, int(le))) for i, j, v, le in rows if i != j]
    exact = DBM.universe(2, XY).tighten(rows)
    packed = kernel.universe(3)
    ok = kernel.apply(packed, kernel.cons_array([(i, j, kernel.pack(v, le)) for i, j, (v, le) in rows]))
    assert ok == (not exact.is_empty())
    if not ok:
        return
    assert np.array_equal(packed, to_kernel(exact))
    kernel.up(packed)
    exact = exact.up()
    for x in sorted(resets):
        kernel.reset(packed, x)
    exact = exact.reset(sorted(resets)).canonical()
    kernel.close(packed)
    assert np.array_equal(packed, to_kernel(exact))
    kernel.extrapolate(packed, np.array([0] + bounds, dtype=kernel.DTYPE))
    assert np.array_equal(packed, to_kernel(exact.extrapolate(bounds)))


@settings(max_examples=100, deadline=None)
@given(st.lists(atoms, min_size=1, max_size=4))
def test_pick_point_is_member(atoms_):
    d = zone(*atoms_)
    if d.is_empty():
        return
    assert d.contains(d.pick_point())
