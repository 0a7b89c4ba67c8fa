"""Checking one indexed property on one network instantiation.

Every ground formula is reduced to a search over the engine's node graph:

* ``E F`` is reachability of ``psi`` with the formula clock inside the bound;
* ``E G`` looks for a maximal path in the graph restricted to valuations
  where the body holds or the bound is off (a deadlock, a time-divergent
  node or a cycle);
* ``E U`` is reachability of ``psi`` through ``phi`` nodes;
* ``Einf`` variants additionally need an infinite continuation, found by a
  second exploration seeded at every hit;
* universal forms are the negated existential duals.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction

from . import search
from .logic import (
    UNIVERSAL,
    Bound,
    GroundFormula,
    Property,
    SAtom,
    STrue,
    atoms,
    check_combination,
    compile_state_formula,
    neg,
    substitute,
)
from .model import NetworkSpec, Template, as_sizes, scale_factor, scale_to_integers
from .semantics import DiscreteEngine, EngineLimitation, Network, Run
from .zones import ZoneEngine

ENGINES = ("zone", "discrete")


class TooFewInstances(ValueError):
    def __init__(self, var: str, template: str, needed: int, have: int):
        super().__init__(
            f"binder {var}:{template} needs {needed} instance(s) of {template}, the network has {have}"
        )
        self.var = var


class EqualityBoundRejected(EngineLimitation):
    """An ``= q`` bound under the IMITL compliance mode."""


@dataclass
class Verdict:
    truth: bool
    witness: Run | None = None
    engine: str = "zone"
    stats: dict = field(default_factory=dict)
    formula: GroundFormula | None = None

    def __bool__(self):
        return self.truth


# ---------------------------------------------------------------------------
# expansion


def expand_indices(prop: Property, sizes, spec: NetworkSpec) -> list[GroundFormula]:
    sizes = as_sizes(sizes)
    names = [t.name for t in spec.templates]
    tidx = {}
    for var, tname in prop.binders:
        if tname not in names:
            raise KeyError(f"unknown template {tname}")
        tidx[var] = names.index(tname)
    ranges = []
    for var, tname in prop.binders:
        n = sizes[tidx[var]]
        if n == 0:
            return []  # nothing to quantify over
        needed = 1 + sum(
            1 for other, t in prop.binders if t == tname and other != var and frozenset((var, other)) in prop.distinct
        )
        if n < needed:
            raise TooFewInstances(var, tname, needed, n)
        ranges.append(range(1, n + 1))
    out = []
    for combo in itertools.product(*ranges):
        env = dict(zip(prop.vars, combo))
        if any(env[a] == env[b] for a, b in (tuple(p) for p in prop.distinct)):
            continue
        right = substitute(prop.right, env, tidx)
        left = None if prop.left is None else substitute(prop.left, env, tidx)
        out.append(GroundFormula(prop.quantifier, prop.op, right, left, prop.bound, tuple(env.items())))
    return out


def add_formula_clock(spec: NetworkSpec, bound) -> tuple[NetworkSpec, str]:
    """Spec with a one-state auxiliary template owning a never-reset clock.

    The auxiliary template is appended last and instantiated once; the
    returned name is its clock.  The checker itself uses the equivalent
    built-in clock of :class:`Network` (``formula_clock=True``).
    """
    op, q = bound if isinstance(bound, tuple) else (bound.op, bound.value)
    if Fraction(q).denominator != 1:
        raise ValueError("scale the bound to an integer first")
    name = "_Z"
    while name in {t.name for t in spec.templates}:
        name += "_"
    aux = Template(name, ("z0",), "z0", ("z",), (), {})
    return replace(spec, templates=spec.templates + (aux,)), "z"


# ---------------------------------------------------------------------------
# searches over an engine


class _Ctx:
    def __init__(self, eng, bound: Bound, want_witness: bool):
        self.eng = eng
        self.T = bound.cons()
        self.C = bound.complement()
        self.want = want_witness
        self.explored = 0

    def run(self, path, final=None, tail=None):
        if not self.want:
            return None
        try:
            return self.eng.concretize(path, final, tail)
        except EngineLimitation:
            return None


def _cover(eng):
    # zone inclusion for upward-closed searches; the discrete engine has none
    make = getattr(eng, "cover", None)
    return make() if make is not None else None


def _ef(ctx: _Ctx, pred, graph=None):
    """E F: the path to a node satisfying ``pred`` within the bound."""
    eng, T = ctx.eng, ctx.T
    if graph is not None:
        for nid, node in enumerate(graph.nodes):
            if pred(eng.states(node)) and eng.meets(node, T):
                return graph.path(nid)
        return None

    def visit(g, nid, entry, new):
        node = g.nodes[nid]
        return True if new and pred(eng.states(node)) and eng.meets(node, T) else None

    g = search.explore(eng, visit=visit, keep_edges=False, subsume=_cover(eng))
    ctx.explored += len(g)
    return None if g.hit is None else g.hit_path()


def _infinite_from(ctx: _Ctx, starts):
    """Run witnessing an infinite continuation from one of ``starts``."""
    eng = ctx.eng
    if not starts:
        return None

    def visit(g, nid, entry, new):
        return True if new and eng.divergent(g.nodes[nid]) else None

    g = search.explore(eng, starts=starts, visit=visit)
    ctx.explored += len(g)
    if g.hit is not None:
        return ("diverge", g.hit_path())
    cyc = g.find_cycle()
    if cyc is not None:
        path, k = cyc
        return ("cycle", path, k)
    return None


def _witness_inf(ctx: _Ctx, found):
    if found[0] == "diverge":
        return ctx.run(found[1], tail=("diverge",))
    return ctx.run(found[1], tail=("cycle", found[2]))


def _einf_f(ctx: _Ctx, pred):
    eng, T = ctx.eng, ctx.T
    hits = []

    def visit(g, nid, entry, new):
        node = g.nodes[nid]
        if new and pred(eng.states(node)) and eng.meets(node, T):
            hits.append(nid)
        return None

    g = search.explore(eng, visit=visit, keep_edges=False, subsume=_cover(eng))
    ctx.explored += len(g)
    starts = []
    for h in hits:
        node = g.nodes[h]
        if not T:
            starts.append((g.path(h), node, None))
            continue
        r = eng.restrict(node, T)
        if r is not None:
            starts.append((g.path(h) + [(("restrict", T), r)], r, None))
    found = _infinite_from(ctx, starts)
    if found is None:
        return False, None
    return True, _witness_inf(ctx, found)


def _eg(ctx: _Ctx, body, inf: bool):
    """E G body (within the bound); ``inf`` asks for an infinite path.

    When a witness is wanted the whole restricted graph is explored so that
    a lasso through real steps is preferred over plain idling.
    """
    eng, C = ctx.eng, ctx.C
    ends = []

    def allowed(states):
        return None if body(states) else C

    def visit(g, nid, entry, new):
        if not new:
            return None
        node = g.nodes[nid]
        if eng.divergent(node):
            ends.append((nid, ("diverge",)))
        elif not inf:
            rows = eng.deadlock(node)
            if rows is not None:
                ends.append((nid, ("deadlock", rows)))
        return True if ends and not ctx.want else None

    g = search.explore(eng, allowed=allowed, visit=visit)
    ctx.explored += len(g)
    if g.hit is None:
        cyc = g.find_cycle()
        if cyc is not None:
            path, k = cyc
            return True, ctx.run(path, tail=("cycle", k))
    if ends:
        nid, kind = ends[0]
        if kind[0] == "diverge":
            return True, ctx.run(g.path(nid), tail=("diverge",))
        return True, ctx.run(g.path(nid), final=kind[1], tail=("deadlock",))
    return False, None


def _eu(ctx: _Ctx, left, right, inf: bool):
    eng, T = ctx.eng, ctx.T
    hits = []

    def visit(g, nid, entry, new):
        node = g.nodes[nid]
        s = eng.states(node)
        if not right(s):
            return None
        if left(s) and eng.meets(node, T):
            kind = "z"  # psi holds at a later instant of this very node
        elif entry is not None and eng.meets(entry, T):
            kind = "entry"
        else:
            return None
        if not inf:
            return kind
        if kind == "z" and new:
            hits.append(("z", g.path(nid), node, None))
        elif kind == "entry":
            # the entry may differ per arrival, so keep this arrival's path
            hits.append(("entry", g.arrival_path(nid), node, entry))
        return None

    def expand_if(node):
        return left(eng.states(node))

    g = search.explore(eng, expand_if=expand_if, visit=visit, keep_edges=False, subsume=_cover(eng))
    ctx.explored += len(g)
    if not inf:
        if g.hit is None:
            return False, None
        final = ("entry", T) if g.hit[1] == "entry" else ("z", T)
        return True, ctx.run(g.hit_path(), final=final if T else None)
    starts = []
    for kind, base, node, entry in hits:
        if not T:
            starts.append((base, node, None))
        elif kind == "z":
            r = eng.restrict(node, T)
            if r is not None:
                starts.append((base + [(("restrict", T), r)], r, None))
        elif len(base) > 1 and hasattr(eng, "restrict_arrival"):
            res = eng.restrict_arrival(node, base[-1][0], entry, T)
            if res is not None:
                label, r = res
                starts.append((base[:-1] + [(label, r)], r, None))
        else:
            # a start node (or an untimed engine): entry and node coincide
            r = eng.restrict(node, T)
            if r is not None:
                starts.append((base + [(("restrict", T), r)], r, None))
    found = _infinite_from(ctx, starts)
    if found is None:
        return False, None
    return True, _witness_inf(ctx, found)


def _au_counter(ctx: _Ctx, left, right, inf: bool):
    """A counterexample to A(left U right): a maximal path missing the goal."""
    eng, C = ctx.eng, ctx.C
    bad = []

    def allowed(states):
        return None if not right(states) else C

    def visit(g, nid, entry, new):
        if not new:
            return None
        node = g.nodes[nid]
        if not left(eng.states(node)):
            if not inf:
                return ("left",)
            bad.append(nid)
        if eng.divergent(node):
            return ("diverge",)
        if not inf:
            rows = eng.deadlock(node)
            if rows is not None:
                return ("deadlock", rows)
        return None

    g = search.explore(eng, allowed=allowed, visit=visit)
    ctx.explored += len(g)
    if g.hit is not None:
        kind = g.hit[1]
        path = g.hit_path()
        if kind[0] == "left":
            return True, ctx.run(path)
        if kind[0] == "diverge":
            return True, ctx.run(path, tail=("diverge",))
        return True, ctx.run(path, final=kind[1], tail=("deadlock",))
    cyc = g.find_cycle()
    if cyc is not None:
        path, k = cyc
        return True, ctx.run(path, tail=("cycle", k))
    if inf and bad:
        starts = []
        for nid in bad:
            node = g.nodes[nid]
            r = eng.restrict(node, ())
            if r is not None:
                starts.append((g.path(nid) + [(("restrict", ()), r)], r, None))
        found = _infinite_from(ctx, starts)
        if found is not None:
            return True, _witness_inf(ctx, found)
    return False, None


# ---------------------------------------------------------------------------
# public entry points


def _pinned(net: Network, formula: GroundFormula) -> set[int]:
    pins = set()
    for f in (formula.right, formula.left):
        if f is None:
            continue
        for a in atoms(f):
            pins.add(net.flat(a.template, a.var))
    return pins


class _Session:
    """Engines and full graphs shared by the ground formulas of one check."""

    def __init__(self, spec: NetworkSpec, sizes, engine: str, symmetry: bool = True):
        if engine not in ENGINES:
            raise ValueError(f"unknown engine {engine!r} (choose zone or discrete)")
        self.spec = spec
        self.sizes = as_sizes(sizes)
        self.engine = engine
        self.symmetry = symmetry
        self._nets: dict = {}
        self._engines: dict = {}
        self._graphs: dict = {}

    def net(self, timed: bool) -> Network:
        if timed not in self._nets:
            self._nets[timed] = Network(self.spec, self.sizes, formula_clock=timed)
        return self._nets[timed]

    def engine_for(self, bound: Bound, pins, want_witness: bool = True):
        timed = not bound.trivial
        net = self.net(timed)
        bt = (bound.op, bound.value) if timed else None
        pinned = frozenset(pins) if self.symmetry else None
        if self.engine == "discrete" and want_witness:
            pinned = None  # the discrete engine cannot map witnesses back
        key = (bt, pinned)
        eng = self._engines.get(key)
        if eng is None:
            if self.engine == "zone":
                eng = ZoneEngine(net, bound=bt, pinned=pinned)
            else:
                eng = DiscreteEngine(net, bound=bt, pinned=pinned)
            self._engines[key] = eng
        return eng, key

    def full_graph(self, eng, key, ctx: _Ctx):
        g = self._graphs.get(key)
        if g is None:
            g = search.explore(eng, keep_edges=False, subsume=_cover(eng))
            ctx.explored += len(g)
            self._graphs[key] = g
        return g


def check_ground(session: _Session, formula: GroundFormula, want_witness: bool = True) -> Verdict:
    t0 = time.perf_counter()
    q, op = formula.quantifier, formula.op
    check_combination(q, op)
    net = session.net(not formula.bound.trivial)
    eng, key = session.engine_for(formula.bound, _pinned(net, formula), want_witness)
    ctx = _Ctx(eng, formula.bound, want_witness)
    right = compile_state_formula(net, formula.right)
    inf = q in ("Ainf", "Einf")
    universal = q in UNIVERSAL
    if op == "F" and not universal:
        if inf:
            found, run = _einf_f(ctx, right)
        else:
            graph = session.full_graph(eng, key, ctx)
            path = _ef(ctx, right, graph)
            found = path is not None
            run = ctx.run(path, final=("z", ctx.T) if ctx.T else None) if found else None
        truth = found
    elif op == "G" and universal:
        # A G p  <=>  not E F not p
        bad = compile_state_formula(net, neg(formula.right))
        if inf:
            found, run = _einf_f(ctx, bad)
        else:
            graph = session.full_graph(eng, key, ctx)
            path = _ef(ctx, bad, graph)
            found = path is not None
            run = ctx.run(path, final=("z", ctx.T) if ctx.T else None) if found else None
        truth = not found
    elif op == "G":
        found, run = _eg(ctx, right, inf)
        truth = found
    elif op == "F":
        # A F p  <=>  not E G not p
        found, run = _eg(ctx, lambda s: not right(s), inf)
        truth = not found
    else:
        left = compile_state_formula(net, formula.left)
        if universal:
            found, run = _au_counter(ctx, left, right, inf)
            truth = not found
        else:
            found, run = _eu(ctx, left, right, inf)
            truth = found
    stats = {"states": ctx.explored, "time": time.perf_counter() - t0}
    return Verdict(truth, run, eng.name, stats, formula)


def _prepare(spec: NetworkSpec, bound: Bound, imitl_strict: bool):
    for t in spec.templates:
        for tr in t.transitions:
            if tr.var_ops:
                raise EngineLimitation(
                    f"{t.name}: shared variables are only handled through the PID abstraction "
                    "(run `pnta abstract` first)"
                )
    if imitl_strict and bound.op == "==":
        raise EqualityBoundRejected("equality bounds are outside the IMITL fragment (--imitl-strict)")
    factor = scale_factor(spec, [bound.value])
    if factor != 1:
        spec = scale_to_integers(spec, [bound.value])
        bound = Bound(bound.op, bound.value * factor)
    return spec, bound


def check(spec: NetworkSpec, sizes, prop: Property, engine: str = "zone",
          imitl_strict: bool = False, want_witness: bool = True, symmetry: bool = True) -> Verdict:
    """Conjunction of the ground formulas of ``prop`` at ``sizes``."""
    t0 = time.perf_counter()
    check_combination(prop.quantifier, prop.op)
    spec, bound = _prepare(spec, prop.bound, imitl_strict)
    prop = replace(prop, bound=bound)
    formulas = expand_indices(prop, sizes, spec)
    session = _Session(spec, sizes, engine, symmetry)
    explored = 0
    for f in formulas:
        v = check_ground(session, f, want_witness)
        explored += v.stats["states"]
        if not v.truth:
            v.stats = {"states": explored, "time": time.perf_counter() - t0}
            return v
    return Verdict(True, None, engine, {"states": explored, "time": time.perf_counter() - t0})


def _ground(spec: NetworkSpec, sizes, quantifier, op, right, left=None, bound=None) -> GroundFormula:
    return GroundFormula(quantifier, op, right, left, bound or Bound())


def check_formula(spec: NetworkSpec, sizes, formula: GroundFormula, engine: str = "zone",
                  want_witness: bool = True) -> Verdict:
    """Check one ground formula (bound given in model time units)."""
    spec, bound = _prepare(spec, formula.bound, False)
    formula = replace(formula, bound=bound)
    return check_ground(_Session(spec, sizes, engine), formula, want_witness)


def check_E_F(spec, sizes, phi, bound: Bound | None = None, engine: str = "zone", quantifier: str = "E") -> Verdict:
    return check_formula(spec, sizes, _ground(spec, sizes, quantifier, "F", phi, None, bound), engine)


def check_A_G(spec, sizes, phi, bound: Bound | None = None, engine: str = "zone", quantifier: str = "A") -> Verdict:
    return check_formula(spec, sizes, _ground(spec, sizes, quantifier, "G", phi, None, bound), engine)


def check_A_F(spec, sizes, phi, bound: Bound | None = None, engine: str = "zone", quantifier: str = "A") -> Verdict:
    return check_formula(spec, sizes, _ground(spec, sizes, quantifier, "F", phi, None, bound), engine)


def check_E_G(spec, sizes, phi, bound: Bound | None = None, engine: str = "zone", quantifier: str = "E") -> Verdict:
    return check_formula(spec, sizes, _ground(spec, sizes, quantifier, "G", phi, None, bound), engine)


def check_until(spec, sizes, phi, psi, bound: Bound | None = None, engine: str = "zone",
                quantifier: str = "E") -> Verdict:
    return check_formula(spec, sizes, _ground(spec, sizes, quantifier, "U", psi, phi, bound), engine)


def atom(spec: NetworkSpec, template: str, state: str, instance: int) -> SAtom:
    """Ground atom ``state(instance)`` of the named template."""
    names = [t.name for t in spec.templates]
    return SAtom(state, instance, names.index(template))


__all__ = [
    "ENGINES",
    "EqualityBoundRejected",
    "STrue",
    "TooFewInstances",
    "Verdict",
    "add_formula_clock",
    "atom",
    "check",
    "check_A_F",
    "check_A_G",
    "check_E_F",
    "check_E_G",
    "check_formula",
    "check_ground",
    "check_until",
    "expand_indices",
]
