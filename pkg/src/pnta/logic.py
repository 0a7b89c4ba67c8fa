"""Indexed property syntax: binders, path quantifier, one timed F/G/U layer."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

QUANTIFIERS = ("A", "E", "Ainf", "Einf", "Afin", "Efin")
UNIVERSAL = {"A", "Ainf", "Afin"}


class UnsupportedQuantifierOperator(ValueError):
    def __init__(self, quantifier: str, op: str):
        super().__init__(
            f"{quantifier} with {op} is not supported: finite-prefix quantifiers only "
            "make sense for reachability (Efin F) and safety (Afin G); "
            "a length-0 prefix trivially decides the other combinations"
        )
        self.quantifier = quantifier
        self.op = op


def check_combination(quantifier: str, op: str) -> None:
    if quantifier == "Efin" and op == "F":
        return
    if quantifier == "Afin" and op == "G":
        return
    if quantifier.endswith("fin"):
        raise UnsupportedQuantifierOperator(quantifier, op)


@dataclass(frozen=True)
class STrue:
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class SFalse:
    def __str__(self):
        return "false"


@dataclass(frozen=True)
class SAtom:
    """``state(var)``; ``var`` is an index variable or, once ground, an int."""

    state: str
    var: Union[str, int]
    template: int | None = None  # set once ground

    def __str__(self):
        return f"{self.state}({self.var})"


@dataclass(frozen=True)
class SNot:
    arg: "StateFormula"

    def __str__(self):
        a = self.arg
        inner = str(a)
        return f"!{inner}" if isinstance(a, (SAtom, STrue, SFalse, SNot)) else f"!({inner})"


@dataclass(frozen=True)
class SAnd:
    args: tuple

    def __str__(self):
        return " & ".join(_wrap(a) for a in self.args)


@dataclass(frozen=True)
class SOr:
    args: tuple

    def __str__(self):
        return " | ".join(_wrap(a) for a in self.args)


StateFormula = Union[STrue, SFalse, SAtom, SNot, SAnd, SOr]


def _wrap(f) -> str:
    return f"({f})" if isinstance(f, (SAnd, SOr)) else str(f)


def neg(f: StateFormula) -> StateFormula:
    if isinstance(f, SNot):
        return f.arg
    if isinstance(f, STrue):
        return SFalse()
    if isinstance(f, SFalse):
        return STrue()
    return SNot(f)


def atoms(f: StateFormula):
    if isinstance(f, SAtom):
        yield f
    elif isinstance(f, SNot):
        yield from atoms(f.arg)
    elif isinstance(f, (SAnd, SOr)):
        for a in f.args:
            yield from atoms(a)


def substitute(f: StateFormula, env: dict, templates: dict) -> StateFormula:
    """Replace index variables by instance numbers."""
    if isinstance(f, SAtom):
        if isinstance(f.var, int):
            return f
        return SAtom(f.state, env[f.var], templates[f.var])
    if isinstance(f, SNot):
        return SNot(substitute(f.arg, env, templates))
    if isinstance(f, SAnd):
        return SAnd(tuple(substitute(a, env, templates) for a in f.args))
    if isinstance(f, SOr):
        return SOr(tuple(substitute(a, env, templates) for a in f.args))
    return f


@dataclass(frozen=True)
class Bound:
    op: str = ">="
    value: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))
        if self.value < 0:
            raise ValueError("time bounds are non-negative")

    @property
    def trivial(self) -> bool:
        return self.op == ">=" and self.value == 0

    def holds(self, t) -> bool:
        from .model import compare

        return compare(t, self.op, self.value)

    def complement(self) -> list:
        """Convex pieces of the complement, each a tuple of (op, q)."""
        q = self.value
        return {
            "<": [((">=", q),)],
            "<=": [((">", q),)],
            ">": [(("<=", q),)],
            ">=": [(("<", q),)] if q > 0 else [],
            "==": [(("<", q),), ((">", q),)] if q > 0 else [((">", q),)],
        }[self.op]

    def cons(self) -> tuple:
        return () if self.trivial else ((self.op, self.value),)

    def __str__(self):
        from .model import fmt_rational

        return f"{self.op}{fmt_rational(self.value)}"


@dataclass(frozen=True)
class Property:
    binders: tuple  # ((var, template name), ...)
    quantifier: str
    op: str  # "F", "G" or "U"
    right: StateFormula
    left: StateFormula | None = None
    bound: Bound = field(default_factory=Bound)
    distinct: frozenset = frozenset()  # frozensets {i, j}

    def __post_init__(self):
        if self.quantifier not in QUANTIFIERS:
            raise ValueError(f"unknown path quantifier {self.quantifier}")
        if self.op not in ("F", "G", "U"):
            raise ValueError(f"unknown temporal operator {self.op}")
        if (self.op == "U") != (self.left is not None):
            raise ValueError("only U takes a left operand")

    @property
    def vars(self) -> list[str]:
        return [v for v, _ in self.binders]

    def template_of(self, var: str) -> str:
        for v, t in self.binders:
            if v == var:
                return t
        raise KeyError(var)

    def __str__(self):
        head = ""
        if self.binders:
            head = "forall " + ", ".join(f"{v}:{t}" for v, t in self.binders)
            if self.distinct:
                pairs = sorted(tuple(sorted(p)) for p in self.distinct)
                head += " with " + ", ".join(f"{a} != {b}" for a, b in pairs)
            head += " . "
        if self.op == "U":
            body = f"({self.left}) U[{self.bound}] ({self.right})"
        else:
            body = f"{self.op}[{self.bound}] {self.right}"
        return f"{head}{self.quantifier} {body}"


@dataclass(frozen=True)
class GroundFormula:
    quantifier: str
    op: str
    right: StateFormula
    left: StateFormula | None = None
    bound: Bound = field(default_factory=Bound)
    assignment: tuple = ()  # ((var, instance), ...)

    def __str__(self):
        if self.op == "U":
            body = f"({self.left}) U[{self.bound}] ({self.right})"
        else:
            body = f"{self.op}[{self.bound}] {self.right}"
        return f"{self.quantifier} {body}"


def compile_state_formula(net, f: StateFormula):
    """Predicate over a tuple of state indices (flat instance layout)."""
    if isinstance(f, STrue):
        return lambda s: True
    if isinstance(f, SFalse):
        return lambda s: False
    if isinstance(f, SAtom):
        if not isinstance(f.var, int) or f.template is None:
            raise ValueError(f"atom {f} is not ground")
        idx = net.flat(f.template, f.var)
        tmpl = net.templates[f.template]
        if f.state not in tmpl.sidx:
            raise KeyError(f"{tmpl.name} has no state {f.state}")
        sidx = tmpl.sidx[f.state]
        return lambda s: s[idx] == sidx
    if isinstance(f, SNot):
        inner = compile_state_formula(net, f.arg)
        return lambda s: not inner(s)
    parts = [compile_state_formula(net, a) for a in f.args]
    if isinstance(f, SAnd):
        return lambda s: all(p(s) for p in parts)
    return lambda s: any(p(s) for p in parts)


def ground_atom(template: int, state: str, instance: int) -> SAtom:
    return SAtom(state, instance, template)
