"""Model and property file formats, trace and report emitters.

Model files are line-oriented and brace-delimited::

    const k = 2;
    var v;
    template P {
      clocks c;
      init Init;
      state Init;
      state b1 inv c <= k;
      trans Init -> b1 { reset c; read v == 0; }
      trans b1 -> b2 { guard c <= k; reset c; when P in {Init, b1}; }
    }
    system { P: param; }

Comments run from ``#`` or ``//`` to the end of the line.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from .logic import (
    QUANTIFIERS,
    Bound,
    Property,
    SAnd,
    SAtom,
    SFalse,
    SNot,
    SOr,
    STrue,
    UnsupportedQuantifierOperator,
    check_combination,
)
from .model import (
    FALSE,
    OPS,
    TRUE,
    And,
    Atom,
    ConjunctiveGuard,
    Diag,
    FalseC,
    NetworkSpec,
    Not,
    Or,
    Template,
    Transition,
    TrueC,
    VarOp,
    fmt_rational,
    validate_network,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        where = f"line {line}, col {col}: " if line else ""
        super().__init__(where + message)
        self.message = message
        self.line = line
        self.col = col


class ModelWarning(UserWarning):
    pass


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>(\#|//)[^\n]*)
  | (?P<num>\d+(\.\d+)?(/\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|<=|>=|==|!=|:=|&&|\|\||[<>=!&|(){}\[\];:,.])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out, pos, line, start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, m.start() - start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


def parse_rational(text: str) -> Fraction:
    return Fraction(text)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def at(self, *texts) -> bool:
        return self.tok.kind in ("op", "name") and self.tok.text in texts

    def take(self, text: str | None = None, kind: str | None = None) -> Token:
        t = self.tok
        if text is not None and t.text != text:
            self.error(f"expected {text!r}, found {t.text or 'end of input'!r}")
        if kind is not None and t.kind != kind:
            self.error(f"expected {kind}, found {t.text or 'end of input'!r}")
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind in ("op", "name"):
            self.i += 1
            return True
        return False

    def name(self) -> str:
        return self.take(kind="name").text

    def names(self, stop: str) -> list[str]:
        out = []
        if self.at(stop):
            return out
        out.append(self.name())
        while self.accept(","):
            out.append(self.name())
        return out


# ---------------------------------------------------------------------------
# models


@dataclass
class ModelDocument:
    text: str
    spec: NetworkSpec
    warnings: list = field(default_factory=list)
    locations: dict = field(default_factory=dict)  # (template, what) -> (line, col)


class _ModelParser(_Parser):
    def __init__(self, text: str):
        super().__init__(text)
        self.warnings: list[str] = []
        self.locations: dict = {}

    def constraint(self, clocks) -> object:
        return self.c_or(clocks)

    def c_or(self, clocks):
        args = [self.c_and(clocks)]
        while self.accept("||"):
            args.append(self.c_and(clocks))
        return args[0] if len(args) == 1 else Or(tuple(args))

    def c_and(self, clocks):
        args = [self.c_unary(clocks)]
        while self.accept("&&"):
            args.append(self.c_unary(clocks))
        return args[0] if len(args) == 1 else And(tuple(args))

    def c_unary(self, clocks):
        if self.accept("!"):
            return Not(self.c_unary(clocks))
        if self.accept("("):
            c = self.c_or(clocks)
            self.take(")")
            return c
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        tok = self.tok
        clock = self.name()
        if clock not in clocks:
            self.error(f"unknown clock {clock}", tok)
        op = self.take(kind="op").text
        if op == "=":
            op = "=="
        if op not in OPS:
            self.error(f"expected a comparison, found {op!r}")
        rhs = self.tok
        if rhs.kind == "num":
            self.i += 1
            return Atom(clock, op, parse_rational(rhs.text))
        name = self.name()
        if name in clocks:
            return Diag(clock, op, name)
        return Atom(clock, op, name)

    def template(self) -> tuple[Template, list]:
        start = self.take("template")
        tname = self.name()
        self.locations[(tname, "template")] = (start.line, start.col)
        self.take("{")
        clocks: list[str] = []
        states: list[str] = []
        invariants: dict = {}
        initial = None
        trans: list = []
        while not self.at("}"):
            kw = self.tok
            if self.accept("clocks"):
                clocks.extend(self.names(";"))
                self.take(";")
            elif self.accept("init"):
                initial = self.name()
                self.take(";")
            elif self.accept("state"):
                s = self.name()
                self.locations[(tname, s)] = (kw.line, kw.col)
                states.append(s)
                if self.accept("inv"):
                    invariants[s] = self.constraint(clocks)
                self.take(";")
            elif self.accept("trans"):
                trans.append((kw, self.transition(clocks)))
            else:
                self.error(f"unexpected {kw.text!r} in template {tname}")
        self.take("}")
        if initial is None:
            self.error(f"template {tname} declares no initial state", start)
        t = Template(tname, tuple(states), initial, tuple(clocks), (), invariants)
        return t, trans

    def transition(self, clocks):
        src = self.name()
        self.take("->")
        dst = self.name()
        guard, resets, when, ops = TRUE, (), [], []
        self.take("{")
        while not self.at("}"):
            kw = self.tok
            if self.accept("guard"):
                guard = self.constraint(clocks)
            elif self.accept("reset"):
                resets = tuple(self.names(";"))
            elif self.accept("when"):
                tmpl = self.name()
                self.take("in")
                self.take("{")
                allowed = self.names("}")
                self.take("}")
                when.append((kw, tmpl, allowed))
            elif self.accept("read"):
                var = self.name()
                op = self.take(kind="op").text
                if op not in ("==", "!="):
                    self.error("a read compares with == or !=")
                ops.append(VarOp(var, "read", op, self.var_value()))
            elif self.accept("write"):
                var = self.name()
                self.take(":=")
                ops.append(VarOp(var, "write", ":=", self.var_value()))
            else:
                self.error(f"unexpected {kw.text!r} in transition {src} -> {dst}")
            self.take(";")
        self.take("}")
        return src, dst, guard, resets, when, tuple(ops)

    def var_value(self) -> str:
        t = self.tok
        if t.text in ("PID", "0"):
            self.i += 1
            return t.text
        self.error("variables hold PID or 0")

    def document(self, text: str) -> ModelDocument:
        constants: dict = {}
        variables: list[str] = []
        raw: list = []
        system = None
        while self.tok.kind != "eof":
            if self.accept("const"):
                name = self.name()
                self.take("=")
                num = self.take(kind="num")
                constants[name] = parse_rational(num.text)
                self.take(";")
            elif self.accept("var"):
                variables.extend(self.names(";"))
                self.take(";")
            elif self.at("template"):
                raw.append(self.template())
            elif self.at("system"):
                kw = self.take("system")
                self.take("{")
                system = []
                while not self.at("}"):
                    tok = self.tok
                    name = self.name()
                    self.take(":")
                    self.take("param")
                    self.take(";")
                    system.append((tok, name))
                self.take("}")
                if not system:
                    self.error("no templates", kw)
            else:
                self.error(f"unexpected {self.tok.text!r} at top level")
        by_name = {t.name: (t, tr) for t, tr in raw}
        if system is None:
            order = [t.name for t, _ in raw]
        else:
            order = []
            for tok, name in system:
                if name not in by_name:
                    raise ParseError(f"system lists unknown template {name}", tok.line, tok.col)
                order.append(name)
        if not order:
            raise ParseError("no templates", self.tok.line, self.tok.col)
        inits = {t.name: t.initial for t, _ in raw}
        templates = []
        for name in order:
            t, trs = by_name[name]
            built = []
            for kw, (src, dst, guard, resets, when, ops) in trs:
                mapping = {}
                for wkw, other, allowed in when:
                    if other not in inits:
                        raise ParseError(f"when refers to unknown template {other}", wkw.line, wkw.col)
                    allowed = set(allowed)
                    if inits[other] not in allowed:
                        msg = (f"line {wkw.line}: allowed set of {other} omits its initial state "
                               f"{inits[other]}; it is added implicitly")
                        self.warnings.append(msg)
                        warnings.warn(msg, ModelWarning, stacklevel=3)
                        allowed.add(inits[other])
                    mapping[other] = allowed
                built.append(Transition(src, dst, guard, resets, ConjunctiveGuard.of(mapping), ops))
            templates.append(Template(t.name, t.states, t.initial, t.clocks, tuple(built), t.invariants))
        spec = NetworkSpec(tuple(templates), constants, tuple(variables))
        diags = validate_network(spec)
        if diags:
            first = diags[0]
            line, col = self.locations.get((first.template, "template"), (0, 0))
            raise ParseError("; ".join(str(d) for d in diags), line, col)
        return ModelDocument(text, spec, self.warnings, self.locations)


def parse_model_document(text: str) -> ModelDocument:
    return _ModelParser(text).document(text)


def parse_model(text: str) -> NetworkSpec:
    return parse_model_document(text).spec


def load_model(path) -> NetworkSpec:
    from dataclasses import replace

    with open(path, encoding="utf-8") as fh:
        spec = parse_model(fh.read())
    return replace(spec, source=str(path))


def format_constraint(c) -> str:
    if isinstance(c, TrueC):
        return "true"
    if isinstance(c, FalseC):
        return "false"
    if isinstance(c, Atom):
        return f"{c.clock} {c.op} {fmt_rational(c.value)}"
    if isinstance(c, Diag):
        return f"{c.left} {c.op} {c.right}"
    if isinstance(c, Not):
        return f"!{_wrapc(c.arg)}"
    sep = " && " if isinstance(c, And) else " || "
    return sep.join(_wrapc(a) for a in c.args)


def _wrapc(c) -> str:
    if isinstance(c, (And, Or)) or isinstance(c, Not):
        return f"({format_constraint(c)})"
    return format_constraint(c)


def print_model(spec: NetworkSpec) -> str:
    lines = []
    for name, value in spec.constants.items():
        lines.append(f"const {name} = {fmt_rational(value)};")
    if spec.variables:
        lines.append(f"var {', '.join(spec.variables)};")
    if lines:
        lines.append("")
    for t in spec.templates:
        lines.append(f"template {t.name} {{")
        if t.clocks:
            lines.append(f"  clocks {', '.join(t.clocks)};")
        lines.append(f"  init {t.initial};")
        for s in t.states:
            inv = t.invariants.get(s)
            suffix = "" if inv is None else f" inv {format_constraint(inv)}"
            lines.append(f"  state {s}{suffix};")
        order = {u.name: u for u in spec.templates}
        for tr in t.transitions:
            parts = []
            if not isinstance(tr.guard, TrueC):
                parts.append(f"guard {format_constraint(tr.guard)};")
            if tr.resets:
                parts.append(f"reset {', '.join(tr.resets)};")
            for other, allowed in tr.cguard.allowed:
                ref = order.get(other)
                listed = [s for s in ref.states if s in allowed] if ref else sorted(allowed)
                parts.append(f"when {other} in {{{', '.join(listed)}}};")
            for op in tr.var_ops:
                if op.kind == "write":
                    parts.append(f"write {op.var} := {op.value};")
                else:
                    parts.append(f"read {op.var} {op.op} {op.value};")
            body = " ".join(parts)
            lines.append(f"  trans {tr.source} -> {tr.target} {{ {body} }}" if body
                         else f"  trans {tr.source} -> {tr.target} {{ }}")
        lines.append("}")
        lines.append("")
    lines.append("system { " + " ".join(f"{t.name}: param;" for t in spec.templates) + " }")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# properties


class _PropertyParser(_Parser):
    def __init__(self, text: str, spec: NetworkSpec | None):
        super().__init__(text)
        self.spec = spec
        self.binders: dict[str, str] = {}

    def sf(self):
        args = [self.sf_and()]
        while self.accept("|"):
            args.append(self.sf_and())
        return args[0] if len(args) == 1 else SOr(tuple(args))

    def sf_and(self):
        args = [self.sf_unary()]
        while self.accept("&"):
            args.append(self.sf_unary())
        return args[0] if len(args) == 1 else SAnd(tuple(args))

    def sf_unary(self):
        if self.accept("!"):
            return SNot(self.sf_unary())
        if self.accept("("):
            f = self.sf()
            self.take(")")
            return f
        if self.accept("true"):
            return STrue()
        if self.accept("false"):
            return SFalse()
        tok = self.tok
        state = self.name()
        self.take("(")
        var = self.name()
        self.take(")")
        if var not in self.binders:
            self.error(f"index variable {var} is not bound", tok)
        if self.spec is not None:
            tmpl = self.spec.template(self.binders[var])
            if state not in tmpl.states:
                self.error(f"template {tmpl.name} has no state {state}", tok)
        return SAtom(state, var)

    def bound(self) -> Bound:
        self.take("[")
        op = self.take(kind="op").text
        if op == "=":
            op = "=="
        if op not in OPS:
            self.error(f"bad bound operator {op!r}")
        q = parse_rational(self.take(kind="num").text)
        self.take("]")
        return Bound(op, q)

    def prop(self) -> Property:
        binders = []
        distinct = set()
        if self.accept("forall"):
            while True:
                tok = self.tok
                var = self.name()
                self.take(":")
                tname = self.name()
                if var in self.binders:
                    self.error(f"index variable {var} bound twice", tok)
                if self.spec is not None and tname not in self.spec.names:
                    self.error(f"unknown template {tname}", tok)
                self.binders[var] = tname
                binders.append((var, tname))
                if not self.accept(","):
                    break
            if self.accept("with"):
                while True:
                    tok = self.tok
                    a = self.name()
                    self.take("!=")
                    b = self.name()
                    for v in (a, b):
                        if v not in self.binders:
                            self.error(f"index variable {v} is not bound", tok)
                    if a == b:
                        self.error("an index cannot differ from itself", tok)
                    distinct.add(frozenset((a, b)))
                    if not self.accept(","):
                        break
            self.take(".")
        qtok = self.tok
        q = self.name()
        if q not in QUANTIFIERS:
            self.error(f"unknown path quantifier {q}", qtok)
        if self.at("F", "G"):
            op = self.take().text
            b = self.bound()
            try:
                check_combination(q, op)
            except UnsupportedQuantifierOperator as exc:
                self.error(str(exc), qtok)
            right, left = self.sf(), None
        else:
            left = self.sf()
            self.take("U")
            b = self.bound()
            try:
                check_combination(q, "U")
            except UnsupportedQuantifierOperator as exc:
                self.error(str(exc), qtok)
            right = self.sf()
        if self.tok.kind != "eof":
            self.error(f"trailing input {self.tok.text!r}")
        return Property(tuple(binders), q, op if left is None else "U", right, left, b, frozenset(distinct))


def parse_property(text: str, spec: NetworkSpec | None = None) -> Property:
    return _PropertyParser(text, spec).prop()


def print_property(prop: Property) -> str:
    return str(prop)


# ---------------------------------------------------------------------------
# traces and reports


def _fmt_time(t) -> str:
    return fmt_rational(Fraction(t))


def emit_trace(run) -> str:
    """One line per step; lassos and deadlocks are marked at the end."""
    net = run.net
    lines = [f"# run: {run.kind.value}, {len(run.steps)} steps"]
    for k, step in enumerate(run.steps):
        t = _fmt_time(run.times[k])
        if step.kind == "delay":
            lines.append(f"@t={t} delay {_fmt_time(step.delay)}")
        else:
            tr = step.trans.model
            resets = ", ".join(tr.resets)
            lines.append(f"@t={t} {net.instance_name(step.owner)}: {tr.source} -> {tr.target} (reset {{{resets}}})")
    if run.kind.value == "infinite" and run.cycle_start is not None:
        lines.append(f"** cycle to step {run.cycle_start} **")
    elif run.kind.value == "deadlocked":
        lines.append("** deadlock **")
    return "\n".join(lines) + "\n"


def emit_report(pv) -> str:
    """Per-size table plus overall verdict, cutoff, engine and wall time."""
    lines = [f"property: {pv.prop}"]
    lines.append(f"engine: {pv.engine}")
    lines.append(f"cutoff: {pv.cutoff}")
    rows = [("sizes", "verdict", "states", "time(s)")]
    for sizes, v in pv.table.items():
        rows.append((str(sizes), "true" if v.truth else "false", str(v.stats.get("states", "-")),
                     f"{v.stats.get('time', 0.0):.2f}"))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    lines.append(f"overall: {'true' if pv.truth else 'false'}")
    if pv.witness_sizes is not None:
        lines.append(f"first failing size: {pv.witness_sizes}")
    lines.append(f"wall time: {pv.wall_time:.2f}s")
    return "\n".join(lines) + "\n"
