"""Static syntax of timed-automaton templates, networks and their clock constraints.

Everything here is an immutable value.  Constraints keep constant names
symbolic (``c <= k``) so that printing a parsed model gives back the source;
use :meth:`NetworkSpec.value` to resolve a bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

OPS = ("<", "<=", ">", ">=", "==")

# Negation of a single atom, as a disjunction of atoms.
_NEGATE = {
    "<": (">=",),
    "<=": (">",),
    ">": ("<=",),
    ">=": ("<",),
    "==": ("<", ">"),
}


class ModelError(Exception):
    """Base class for errors raised on malformed models."""


class NonConvexInvariant(ModelError):
    def __init__(self, template: str, state: str):
        super().__init__(f"invariant of {template}.{state} is not a conjunction of atoms")
        self.template = template
        self.state = state


# ---------------------------------------------------------------------------
# clock constraints


@dataclass(frozen=True)
class TrueC:
    def __str__(self) -> str:
        return "true"


@dataclass(frozen=True)
class FalseC:
    def __str__(self) -> str:
        return "false"


@dataclass(frozen=True)
class Atom:
    """``clock op value`` where value is a rational or the name of a constant."""

    clock: str
    op: str
    value: Union[Fraction, str]

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"bad comparison operator {self.op!r}")
        if not isinstance(self.value, str):
            object.__setattr__(self, "value", Fraction(self.value))

    def __str__(self) -> str:
        return f"{self.clock} {self.op} {fmt_rational(self.value)}"


@dataclass(frozen=True)
class Diag:
    """Diagonal atom ``left op right`` between two clocks of one template."""

    left: str
    op: str
    right: str

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"bad comparison operator {self.op!r}")

    def __str__(self) -> str:
        return f"{self.left} {self.op} {self.right}"


@dataclass(frozen=True)
class Not:
    arg: "Constraint"

    def __str__(self) -> str:
        return f"!({self.arg})"


@dataclass(frozen=True)
class And:
    args: tuple

    def __str__(self) -> str:
        return " && ".join(_paren(a) for a in self.args) if self.args else "true"


@dataclass(frozen=True)
class Or:
    args: tuple

    def __str__(self) -> str:
        return " || ".join(_paren(a) for a in self.args) if self.args else "false"


Constraint = Union[TrueC, FalseC, Atom, Diag, Not, And, Or]
TRUE = TrueC()
FALSE = FalseC()


def _paren(c: Constraint) -> str:
    return f"({c})" if isinstance(c, (And, Or)) and len(c.args) > 1 else str(c)


def fmt_rational(value) -> str:
    if isinstance(value, str):
        return value
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def conj(atoms: Sequence[Constraint]) -> Constraint:
    atoms = tuple(atoms)
    if not atoms:
        return TRUE
    if len(atoms) == 1:
        return atoms[0]
    return And(atoms)


def atoms_of(c: Constraint) -> Iterator[Union[Atom, Diag]]:
    if isinstance(c, (Atom, Diag)):
        yield c
    elif isinstance(c, Not):
        yield from atoms_of(c.arg)
    elif isinstance(c, (And, Or)):
        for a in c.args:
            yield from atoms_of(a)


def compare(lhs, op: str, rhs) -> bool:
    if op == "<":
        return lhs < rhs
    if op == "<=":
        return lhs <= rhs
    if op == ">":
        return lhs > rhs
    if op == ">=":
        return lhs >= rhs
    return lhs == rhs


def negate_atom(a: Union[Atom, Diag]) -> list:
    if isinstance(a, Atom):
        return [Atom(a.clock, op, a.value) for op in _NEGATE[a.op]]
    return [Diag(a.left, op, a.right) for op in _NEGATE[a.op]]


def to_dnf(c: Constraint, positive: bool = True) -> list[tuple]:
    """Disjunctive normal form as a list of conjunctions (tuples of atoms).

    ``[]`` is false, ``[()]`` is true.  Negations end up on atoms only.
    """
    if isinstance(c, TrueC):
        return [()] if positive else []
    if isinstance(c, FalseC):
        return [] if positive else [()]
    if isinstance(c, (Atom, Diag)):
        if positive:
            return [(c,)]
        return [(n,) for n in negate_atom(c)]
    if isinstance(c, Not):
        return to_dnf(c.arg, not positive)
    if isinstance(c, And) == positive:
        # conjunction: cross product
        result = [()]
        for arg in c.args:
            sub = to_dnf(arg, positive)
            result = [r + s for r in result for s in sub]
            if not result:
                break
        return result
    out = []
    for arg in c.args:
        out.extend(to_dnf(arg, positive))
    return out


def satisfies(c: Constraint, valuation: Mapping[str, Fraction], constants: Mapping[str, Fraction]) -> bool:
    if isinstance(c, TrueC):
        return True
    if isinstance(c, FalseC):
        return False
    if isinstance(c, Atom):
        bound = constants[c.value] if isinstance(c.value, str) else c.value
        return compare(valuation[c.clock], c.op, bound)
    if isinstance(c, Diag):
        return compare(valuation[c.left], c.op, valuation[c.right])
    if isinstance(c, Not):
        return not satisfies(c.arg, valuation, constants)
    if isinstance(c, And):
        return all(satisfies(a, valuation, constants) for a in c.args)
    return any(satisfies(a, valuation, constants) for a in c.args)


def map_atoms(c: Constraint, fn) -> Constraint:
    if isinstance(c, (Atom, Diag)):
        return fn(c)
    if isinstance(c, Not):
        return Not(map_atoms(c.arg, fn))
    if isinstance(c, And):
        return And(tuple(map_atoms(a, fn) for a in c.args))
    if isinstance(c, Or):
        return Or(tuple(map_atoms(a, fn) for a in c.args))
    return c


# ---------------------------------------------------------------------------
# templates and networks


@dataclass(frozen=True)
class ConjunctiveGuard:
    """Allowed-state sets keyed by template name; absent templates are unrestricted.

    The instance taking the transition is never checked against its own
    template's set.
    """

    allowed: tuple = ()  # sorted tuple of (template name, frozenset of states)

    @classmethod
    def of(cls, mapping: Mapping[str, Iterable[str]] | None = None) -> "ConjunctiveGuard":
        mapping = mapping or {}
        return cls(tuple(sorted((k, frozenset(v)) for k, v in mapping.items())))

    def as_dict(self) -> dict[str, frozenset]:
        return dict(self.allowed)

    def allowed_for(self, template: str):
        """The allowed set for ``template`` or ``None`` if unrestricted."""
        for name, states in self.allowed:
            if name == template:
                return states
        return None

    @property
    def trivial(self) -> bool:
        return not self.allowed


TRUE_GUARD = ConjunctiveGuard()


@dataclass(frozen=True)
class VarOp:
    """Shared-variable annotation on a transition (input to the PID abstraction).

    ``kind`` is ``"read"`` or ``"write"``; reads carry ``op`` ``==``/``!=``;
    ``value`` is ``"PID"`` or ``"0"``.
    """

    var: str
    kind: str
    op: str
    value: str

    def __str__(self) -> str:
        if self.kind == "write":
            return f"write {self.var} := {self.value}"
        return f"read {self.var} {self.op} {self.value}"


@dataclass(frozen=True)
class Transition:
    source: str
    target: str
    guard: Constraint = TRUE
    resets: tuple = ()
    cguard: ConjunctiveGuard = TRUE_GUARD
    var_ops: tuple = ()


@dataclass(frozen=True)
class Template:
    name: str
    states: tuple
    initial: str
    clocks: tuple = ()
    transitions: tuple = ()
    invariants: Mapping[str, Constraint] = field(default_factory=dict, hash=False)

    def invariant(self, state: str) -> Constraint:
        return self.invariants.get(state, TRUE)

    @property
    def size(self) -> int:
        return len(self.states)

    def outgoing(self, state: str) -> list[Transition]:
        return [t for t in self.transitions if t.source == state]


@dataclass(frozen=True)
class NetworkSpec:
    templates: tuple
    constants: Mapping[str, Fraction] = field(default_factory=dict, hash=False)
    variables: tuple = ()
    scale: int = 1
    source: str | None = None

    def template(self, name: str) -> Template:
        for t in self.templates:
            if t.name == name:
                return t
        raise KeyError(name)

    def template_index(self, name: str) -> int:
        for i, t in enumerate(self.templates):
            if t.name == name:
                return i
        raise KeyError(name)

    @property
    def names(self) -> list[str]:
        return [t.name for t in self.templates]

    def value(self, v) -> Fraction:
        return self.constants[v] if isinstance(v, str) else v


@dataclass(frozen=True)
class SizeVector:
    sizes: tuple

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        if any(n < 0 for n in self.sizes):
            raise ValueError("instance counts must be non-negative")

    def __iter__(self):
        return iter(self.sizes)

    def __len__(self):
        return len(self.sizes)

    def __getitem__(self, i):
        return self.sizes[i]

    def __le__(self, other: "SizeVector") -> bool:
        return len(self) == len(other) and all(a <= b for a, b in zip(self, other))

    def __str__(self) -> str:
        return "(" + ",".join(str(n) for n in self.sizes) + ")"


def as_sizes(sizes) -> SizeVector:
    return sizes if isinstance(sizes, SizeVector) else SizeVector(tuple(sizes))


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    template: str | None = None

    def __str__(self) -> str:
        where = f"{self.template}: " if self.template else ""
        return f"{where}{self.message}"


def validate_network(spec: NetworkSpec) -> list[Diagnostic]:
    diags: list[Diagnostic] = []

    def add(code, msg, tname=None):
        diags.append(Diagnostic(code, msg, tname))

    if not spec.templates:
        add("no-templates", "no templates")
    names = [t.name for t in spec.templates]
    for n in sorted({n for n in names if names.count(n) > 1}):
        add("duplicate-template", f"template {n} declared twice")
    by_name = {t.name: t for t in spec.templates}
    for cname, cval in spec.constants.items():
        if Fraction(cval) < 0:
            add("negative-constant", f"constant {cname} is negative")

    for t in spec.templates:
        states = set(t.states)
        clocks = set(t.clocks)
        if not t.states:
            add("no-states", "template has no states", t.name)
        if len(states) != len(t.states):
            add("duplicate-state", "state names are not unique", t.name)
        if len(clocks) != len(t.clocks):
            add("duplicate-clock", "clock names are not unique", t.name)
        if t.initial not in states:
            add("unknown-state", f"initial state {t.initial} is not declared", t.name)

        def check_constraint(c, where):
            for a in atoms_of(c):
                used = [a.clock] if isinstance(a, Atom) else [a.left, a.right]
                for clk in used:
                    if clk not in clocks:
                        add("unknown-clock", f"{where} uses undeclared clock {clk}", t.name)
                if isinstance(a, Atom):
                    if isinstance(a.value, str):
                        if a.value not in spec.constants:
                            add("unknown-constant", f"{where} uses undefined constant {a.value}", t.name)
                    elif a.value < 0:
                        add("negative-constant", f"{where} compares against negative {a.value}", t.name)

        for s, inv in t.invariants.items():
            if s not in states:
                add("unknown-state", f"invariant for undeclared state {s}", t.name)
            check_constraint(inv, f"invariant of {s}")
        if t.initial in states and not _is_tautology(t.invariant(t.initial)):
            add("initial-invariant", f"initial invariant not ⊤ ({t.invariant(t.initial)})", t.name)

        for k, tr in enumerate(t.transitions):
            where = f"transition {k} ({tr.source} -> {tr.target})"
            for s in (tr.source, tr.target):
                if s not in states:
                    add("unknown-state", f"{where} references undeclared state {s}", t.name)
            for c in tr.resets:
                if c not in clocks:
                    add("unknown-clock", f"{where} resets undeclared clock {c}", t.name)
            check_constraint(tr.guard, f"guard of {where}")
            for tname, allowed in tr.cguard.allowed:
                other = by_name.get(tname)
                if other is None:
                    add("unknown-template", f"{where} guards undeclared template {tname}", t.name)
                    continue
                bad = sorted(set(allowed) - set(other.states))
                if bad:
                    add("unknown-state", f"{where} allows undeclared states {bad} of {tname}", t.name)
                if not allowed:
                    add("empty-allowed", f"{where} has an empty allowed set for {tname}", t.name)
                if other.initial not in allowed:
                    add("initial-missing", f"{where}: initial state missing from allowed set of {tname}", t.name)
            for op in tr.var_ops:
                if op.var not in spec.variables:
                    add("unknown-variable", f"{where} uses undeclared variable {op.var}", t.name)
    return diags


def _is_tautology(c: Constraint) -> bool:
    # Only syntactic truth counts: the initial invariant must be the constant true.
    return isinstance(c, TrueC) or (isinstance(c, And) and all(_is_tautology(a) for a in c.args))


# ---------------------------------------------------------------------------
# normalisation passes


def _spec_rationals(spec: NetworkSpec) -> Iterator[Fraction]:
    yield from (Fraction(v) for v in spec.constants.values())
    for t in spec.templates:
        cs = list(t.invariants.values()) + [tr.guard for tr in t.transitions]
        for c in cs:
            for a in atoms_of(c):
                if isinstance(a, Atom) and not isinstance(a.value, str):
                    yield a.value


def scale_factor(spec: NetworkSpec, extra: Iterable[Fraction] = ()) -> int:
    lcm = 1
    for q in list(_spec_rationals(spec)) + [Fraction(x) for x in extra]:
        lcm = lcm * q.denominator // math.gcd(lcm, q.denominator)
    return lcm


def scale_to_integers(spec: NetworkSpec, extra: Iterable[Fraction] = ()) -> NetworkSpec:
    """Multiply every rational in the model by the LCM of their denominators.

    ``extra`` contributes further denominators (property bounds) so that the
    caller can co-scale them; the factor applied is recorded in ``scale``.
    """
    factor = scale_factor(spec, extra)
    if factor == 1:
        return spec

    def scale_atom(a):
        if isinstance(a, Atom) and not isinstance(a.value, str):
            return Atom(a.clock, a.op, a.value * factor)
        return a

    templates = []
    for t in spec.templates:
        templates.append(
            replace(
                t,
                invariants={s: map_atoms(c, scale_atom) for s, c in t.invariants.items()},
                transitions=tuple(replace(tr, guard=map_atoms(tr.guard, scale_atom)) for tr in t.transitions),
            )
        )
    return replace(
        spec,
        templates=tuple(templates),
        constants={k: Fraction(v) * factor for k, v in spec.constants.items()},
        scale=spec.scale * factor,
    )


def normalize_constraints(spec: NetworkSpec) -> NetworkSpec:
    """Split non-convex guards into parallel transitions; require convex invariants."""
    templates = []
    for t in spec.templates:
        invariants = {}
        for s, inv in t.invariants.items():
            dnf = to_dnf(inv)
            if len(dnf) > 1:
                raise NonConvexInvariant(t.name, s)
            invariants[s] = FALSE if not dnf else conj(dnf[0])
        transitions = []
        for tr in t.transitions:
            for disjunct in to_dnf(tr.guard):
                transitions.append(replace(tr, guard=conj(disjunct)))
        templates.append(replace(t, invariants=invariants, transitions=tuple(transitions)))
    return replace(spec, templates=tuple(templates))


def close_strict_constraints(spec: NetworkSpec) -> NetworkSpec:
    """Rewrite ``c > q`` as ``c >= q+1`` and ``c < q`` as ``c <= q-1``.

    Only meaningful on an integer-scaled model under integer-time semantics;
    this is how the closed variants fed to the discrete oracle are produced.
    """
    if scale_factor(spec) != 1:
        raise ModelError("close_strict_constraints needs an integer-scaled model")

    def close(a):
        if isinstance(a, Atom):
            q = spec.value(a.value)
            if a.op == ">":
                return Atom(a.clock, ">=", q + 1)
            if a.op == "<":
                return FALSE if q == 0 else Atom(a.clock, "<=", q - 1)
        return a

    templates = []
    for t in spec.templates:
        templates.append(
            replace(
                t,
                invariants={s: map_atoms(c, close) for s, c in t.invariants.items()},
                transitions=tuple(replace(tr, guard=map_atoms(tr.guard, close)) for tr in t.transitions),
            )
        )
    return replace(spec, templates=tuple(templates))


def max_constants(spec: NetworkSpec) -> dict[str, dict[str, int]]:
    """Largest constant each clock is compared to, per template (0 if never)."""
    out = {}
    for t in spec.templates:
        m = {c: 0 for c in t.clocks}
        cs = list(t.invariants.values()) + [tr.guard for tr in t.transitions]
        for c in cs:
            for a in atoms_of(c):
                if isinstance(a, Atom) and a.clock in m:
                    v = spec.value(a.value)
                    if v.denominator != 1:
                        raise ModelError("max_constants needs an integer-scaled model")
                    m[a.clock] = max(m[a.clock], int(v))
        out[t.name] = m
    return out


def has_strict(spec: NetworkSpec) -> bool:
    for t in spec.templates:
        cs = list(t.invariants.values()) + [tr.guard for tr in t.transitions]
        for c in cs:
            for dnf in to_dnf(c):
                if any(isinstance(a, Atom) and a.op in ("<", ">") for a in dnf):
                    return True
    return False


def has_diagonals(spec: NetworkSpec) -> bool:
    for t in spec.templates:
        cs = list(t.invariants.values()) + [tr.guard for tr in t.transitions]
        if any(isinstance(a, Diag) for c in cs for a in atoms_of(c)):
            return True
    return False
