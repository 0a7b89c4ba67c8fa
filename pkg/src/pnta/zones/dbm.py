"""Difference-bound matrices over exact numbers.

A bound is a pair ``(value, le)`` where ``le`` is 1 for ``<=`` and 0 for
``<``; tuple order is then the usual bound order, ``(v, 0) < (v, 1)``.
Entry ``[i][j]`` bounds ``x_i - x_j``; index 0 is the constant-zero clock.

This implementation favours clarity and exactness (it accepts Fractions).
The zone-graph explorer uses the integer kernel in :mod:`pnta.zones.kernel`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..model import And, Atom, Diag, TrueC, to_dnf
from ..semantics import EngineLimitation

INF = (math.inf, 0)
LE_ZERO = (0, 1)
LT_ZERO = (0, 0)


class DiagonalUnsupported(EngineLimitation):
    """Raised when a diagonal constraint reaches the zone engine."""


def add(a, b):
    if a[0] == math.inf or b[0] == math.inf:
        return INF
    return (a[0] + b[0], min(a[1], b[1]))


def atom_bounds(i: int, op: str, c) -> list:
    """DBM entries ``(row, col, bound)`` for ``x_i op c``."""
    c = Fraction(c)
    out = []
    if op in ("<", "<=", "=="):
        out.append((i, 0, (c, 0 if op == "<" else 1)))
    if op in (">", ">=", "=="):
        out.append((0, i, (-c, 0 if op == ">" else 1)))
    return out


class DBM:
    def __init__(self, matrix: Sequence[Sequence[tuple]], names: Sequence[str] | None = None):
        self.m = [list(row) for row in matrix]
        self.n = len(self.m) - 1
        self.names = list(names) if names is not None else [f"x{i}" for i in range(1, self.n + 1)]

    # -- constructors -------------------------------------------------------

    @classmethod
    def universe(cls, n: int, names=None) -> "DBM":
        m = [[INF] * (n + 1) for _ in range(n + 1)]
        for i in range(n + 1):
            m[i][i] = LE_ZERO
            m[0][i] = LE_ZERO
        return cls(m, names)

    @classmethod
    def zero(cls, n: int, names=None) -> "DBM":
        return cls([[LE_ZERO] * (n + 1) for _ in range(n + 1)], names)

    @classmethod
    def from_point(cls, point: Sequence, names=None) -> "DBM":
        vals = [Fraction(0)] + [Fraction(v) for v in point]
        n = len(point)
        return cls([[(vals[i] - vals[j], 1) for j in range(n + 1)] for i in range(n + 1)], names)

    def copy(self) -> "DBM":
        return DBM(self.m, self.names)

    def __eq__(self, other):
        return isinstance(other, DBM) and self.m == other.m

    def __repr__(self):
        return f"DBM({self.constraints_text()})"

    def index(self, clock: str) -> int:
        return self.names.index(clock) + 1

    # -- queries ------------------------------------------------------------

    def is_empty(self) -> bool:
        return any(self.m[i][i] < LE_ZERO for i in range(self.n + 1))

    def contains(self, point: Sequence) -> bool:
        vals = [Fraction(0)] + [Fraction(v) for v in point]
        for i in range(self.n + 1):
            for j in range(self.n + 1):
                v, le = self.m[i][j]
                d = vals[i] - vals[j]
                if v != math.inf and (d > v or (d == v and not le)):
                    return False
        return True

    def upper(self, i: int):
        return self.m[i][0]

    def lower(self, i: int):
        v, le = self.m[0][i]
        return (-v, le)

    def constraints_text(self) -> str:
        if self.is_empty():
            return "empty"
        parts = []
        for i in range(1, self.n + 1):
            lo, hi = self.m[0][i], self.m[i][0]
            name = self.names[i - 1]
            parts.append(f"{name} {'>=' if lo[1] else '>'} {-lo[0]}")
            if hi != INF:
                parts.append(f"{name} {'<=' if hi[1] else '<'} {hi[0]}")
        for i in range(1, self.n + 1):
            for j in range(1, self.n + 1):
                if i != j and self.m[i][j] != INF:
                    b = self.m[i][j]
                    parts.append(f"{self.names[i-1]}-{self.names[j-1]} {'<=' if b[1] else '<'} {b[0]}")
        return ", ".join(parts)

    # -- operations (all return new matrices) ------------------------------

    def canonical(self) -> "DBM":
        m = [row[:] for row in self.m]
        n = self.n + 1
        for k in range(n):
            mk = m[k]
            for i in range(n):
                mik = m[i][k]
                if mik[0] == math.inf:
                    continue
                mi = m[i]
                for j in range(n):
                    cand = add(mik, mk[j])
                    if cand < mi[j]:
                        mi[j] = cand
        return DBM(m, self.names)

    def constrain(self, i: int, j: int, bound) -> "DBM":
        out = self.copy()
        if bound < out.m[i][j]:
            out.m[i][j] = bound
        return out.canonical()

    def up(self) -> "DBM":
        out = self.copy()
        for i in range(1, self.n + 1):
            out.m[i][0] = INF
        return out

    def down(self) -> "DBM":
        out = self.copy()
        for i in range(1, self.n + 1):
            out.m[0][i] = LE_ZERO
        return out.canonical()

    def reset(self, clocks: Iterable[int]) -> "DBM":
        out = self.copy()
        for x in clocks:
            for j in range(self.n + 1):
                out.m[x][j] = out.m[0][j]
                out.m[j][x] = out.m[j][0]
            out.m[x][x] = LE_ZERO
        return out

    def free(self, clocks: Iterable[int]) -> "DBM":
        """Drop every constraint on ``clocks`` (except non-negativity)."""
        out = self.copy()
        for x in clocks:
            for j in range(self.n + 1):
                if j != x:
                    out.m[x][j] = INF
                    out.m[j][x] = out.m[j][0]
            out.m[0][x] = LE_ZERO
        return out.canonical()

    def meet(self, other: "DBM") -> "DBM":
        m = [[min(a, b) for a, b in zip(r1, r2)] for r1, r2 in zip(self.m, other.m)]
        return DBM(m, self.names).canonical()

    def tighten(self, rows) -> "DBM":
        """Add bounds given as ``(i, j, (value, le))`` triples."""
        out = self.copy()
        for i, j, b in rows:
            if b < out.m[i][j]:
                out.m[i][j] = b
        return out.canonical()

    def intersect(self, atoms, constants: Mapping | None = None) -> "DBM":
        out = self.copy()
        for a in atoms:
            if isinstance(a, Diag):
                raise DiagonalUnsupported(f"diagonal constraint {a} is not supported by the zone engine")
            value = constants[a.value] if isinstance(a.value, str) else a.value
            for i, j, b in atom_bounds(out.index(a.clock), a.op, value):
                if b < out.m[i][j]:
                    out.m[i][j] = b
        return out.canonical()

    def extrapolate(self, maxconst: Sequence[int]) -> "DBM":
        """Max-constant widening (Extra+); ``maxconst[i-1]`` is M for clock i."""
        big = [0] + list(maxconst)
        src = self.m
        out = self.copy()

        def above(k):
            # lower bound of x_k already exceeds M(x_k)
            return k != 0 and src[0][k] < (-big[k], 1)

        for i in range(self.n + 1):
            for j in range(self.n + 1):
                b = src[i][j]
                if i == j or b == INF:
                    continue
                if i != 0 and (b > (big[i], 1) or above(i) or above(j)):
                    out.m[i][j] = INF
                elif i == 0 and b < (-big[j], 1):
                    out.m[i][j] = (-big[j], 0)
        return out.canonical()

    def pick_point(self) -> list:
        """Some point of a non-empty canonical zone, preferring small integers."""
        z = self.canonical()
        if z.is_empty():
            raise ValueError("empty zone has no points")
        for i in range(1, z.n + 1):
            lo_v, lo_le = -z.m[0][i][0], z.m[0][i][1]
            hi_v, hi_le = z.m[i][0]
            if lo_le:
                v = Fraction(lo_v)
            else:
                v = Fraction(math.floor(lo_v) + 1)
                if hi_v != math.inf and (v > hi_v or (v == hi_v and not hi_le)):
                    v = (Fraction(lo_v) + Fraction(hi_v)) / 2
            z.m[i][0] = (v, 1)
            z.m[0][i] = (-v, 1)
            z = z.canonical()
            assert not z.is_empty()
        return [z.m[i][0][0] for i in range(1, z.n + 1)]


# Function-style API ---------------------------------------------------------


def dbm_from_constraint(constraint, names: Sequence[str], constants: Mapping | None = None) -> DBM:
    dnf = to_dnf(constraint)
    if len(dnf) != 1:
        raise ValueError("zones are convex: the constraint must be a single conjunction")
    return DBM.universe(len(names), names).intersect(dnf[0], constants)


def dbm_canonicalize(d: DBM) -> DBM:
    return d.canonical()


def dbm_up(d: DBM) -> DBM:
    return d.up()


def dbm_reset(d: DBM, clocks) -> DBM:
    return d.reset(d.index(c) if isinstance(c, str) else c for c in clocks)


def dbm_intersect(d: DBM, g, constants: Mapping | None = None) -> DBM:
    if isinstance(g, TrueC):
        return d.copy()
    if isinstance(g, (Atom, Diag)):
        return d.intersect([g], constants)
    if isinstance(g, And):
        atoms = []
        for a in g.args:
            if isinstance(a, (Atom, Diag)):
                atoms.append(a)
            elif not isinstance(a, TrueC):
                raise ValueError("dbm_intersect needs a conjunction of atoms")
        return d.intersect(atoms, constants)
    raise ValueError("dbm_intersect needs a convex conjunction of atoms")


def dbm_extrapolate(d: DBM, maxconst) -> DBM:
    if isinstance(maxconst, Mapping):
        maxconst = [maxconst[c] for c in d.names]
    return d.extrapolate(maxconst)
