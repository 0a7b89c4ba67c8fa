"""Shared-PID-variable abstraction.

A process template that reads and writes a shared variable ``v`` holding
process ids is replaced by its product with a two-state view ``W``
(``diff``: ``v`` holds something else, ``mypid``: ``v`` holds my id).  A
conjunctive guard then keeps at most one instance in a ``*_mypid`` state,
which is what the shared variable guaranteed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping

from .model import (
    ConjunctiveGuard,
    NetworkSpec,
    Template,
    Transition,
    VarOp,
    close_strict_constraints,
    scale_to_integers,
)
from .semantics import DiscreteEngine, Network

DIFF, MYPID = "diff", "mypid"
VIEWS = (DIFF, MYPID)


class IncompleteBinding(ValueError):
    def __init__(self, missing: list[str]):
        super().__init__("unannotated uses of the shared variable: " + "; ".join(missing))
        self.missing = missing


class InitialTagged(ValueError):
    pass


def view_state(state: str, view: str) -> str:
    return f"{state}_{view}"


def split_view(name: str):
    """``(state, view)`` for a product state name, or None."""
    for view in VIEWS:
        suffix = "_" + view
        if name.endswith(suffix) and len(name) > len(suffix):
            return name[: -len(suffix)], view
    return None


def pid_view_template() -> Template:
    """W: the per-process view of the shared variable."""
    trans = (
        Transition(DIFF, DIFF),
        Transition(MYPID, MYPID),
        Transition(DIFF, MYPID),  # my own write
        Transition(MYPID, DIFF),  # a peer overwrote the variable
    )
    return Template("W", (DIFF, MYPID), DIFF, (), trans, {})


@dataclass(frozen=True)
class VarBinding:
    """Reads and writes of ``var`` keyed by transition position in the template."""

    var: str
    annotations: Mapping[int, tuple] = field(default_factory=dict)

    @classmethod
    def from_template(cls, tmpl: Template, var: str) -> "VarBinding":
        ann = {}
        for k, tr in enumerate(tmpl.transitions):
            ops = tuple(op for op in tr.var_ops if op.var == var)
            if ops:
                ann[k] = ops
        return cls(var, ann)

    def ops(self, k: int) -> tuple:
        return tuple(self.annotations.get(k, ()))


@dataclass(frozen=True)
class TaggedTemplate:
    template: Template
    tags: frozenset
    origin: Mapping[str, tuple] = field(default_factory=dict, hash=False)


def _read_ok(op: VarOp, view: str) -> bool:
    if op.value == "PID":
        return (view == MYPID) == (op.op == "==")
    # v = 0 can only be seen from the diff view; v != 0 from both
    return view == DIFF if op.op == "==" else True


def product(P: Template, binding: VarBinding) -> TaggedTemplate:
    """Synchronous product ``P x W``; the tag set is ``S_P x {mypid}``."""
    missing = []
    for k, tr in enumerate(P.transitions):
        uses = [op for op in tr.var_ops if op.var == binding.var]
        if uses and not binding.ops(k):
            missing.append(f"{tr.source} -> {tr.target}")
    for k in binding.annotations:
        if not 0 <= k < len(P.transitions):
            raise ValueError(f"annotation on unknown transition #{k}")
    if missing:
        raise IncompleteBinding(missing)

    states = tuple(view_state(s, w) for s in P.states for w in VIEWS)
    origin = {view_state(s, w): (s, w) for s in P.states for w in VIEWS}
    trans = []
    observed = set()  # P-states whose view is tested later
    for k, tr in enumerate(P.transitions):
        ops = binding.ops(k)
        if any(op.kind == "read" for op in ops):
            observed.add(tr.source)
        for w in VIEWS:
            if not all(_read_ok(op, w) for op in ops if op.kind == "read"):
                continue
            target_view = w
            for op in ops:
                if op.kind == "write":
                    target_view = MYPID if op.value == "PID" else DIFF
            trans.append(Transition(
                view_state(tr.source, w), view_state(tr.target, target_view), tr.guard, tr.resets,
                ConjunctiveGuard(), (),
            ))
    # a peer's write turns my view to diff; it only matters where I test v
    for s in P.states:
        if s in observed:
            trans.append(Transition(view_state(s, MYPID), view_state(s, DIFF)))
    invariants = {}
    for s, inv in P.invariants.items():
        for w in VIEWS:
            invariants[view_state(s, w)] = inv
    tmpl = Template(P.name, states, view_state(P.initial, DIFF), P.clocks, tuple(trans), invariants)
    tags = frozenset(view_state(s, MYPID) for s in P.states)
    return TaggedTemplate(tmpl, tags, origin)


def add_mutex_guards(t: TaggedTemplate) -> Template:
    tmpl = t.template
    if tmpl.initial in t.tags:
        raise InitialTagged(f"initial state {tmpl.initial} is tagged")
    if not t.tags:
        return tmpl
    allowed = [s for s in tmpl.states if s not in t.tags]
    trans = []
    for tr in tmpl.transitions:
        if tr.target in t.tags:
            tr = replace(tr, cguard=ConjunctiveGuard.of({tmpl.name: allowed}))
        trans.append(tr)
    return replace(tmpl, transitions=tuple(trans))


def prune_unreachable(t: Template) -> Template:
    """Drop states not reachable in the template graph (guards ignored)."""
    seen = {t.initial}
    queue = deque([t.initial])
    while queue:
        s = queue.popleft()
        for tr in t.transitions:
            if tr.source == s and tr.target not in seen:
                seen.add(tr.target)
                queue.append(tr.target)
    states = tuple(s for s in t.states if s in seen)
    trans = []
    for tr in t.transitions:
        if tr.source not in seen or tr.target not in seen:
            continue
        cg = tr.cguard
        if not cg.trivial:
            cg = ConjunctiveGuard.of({
                name: [s for s in allowed if name != t.name or s in seen] for name, allowed in cg.allowed
            })
        trans.append(replace(tr, cguard=cg))
    invariants = {s: c for s, c in t.invariants.items() if s in seen}
    return replace(t, states=states, transitions=tuple(trans), invariants=invariants)


def abstract_spec(spec: NetworkSpec, template: str, var: str, prune: bool = True) -> NetworkSpec:
    """The whole pipeline on one template of ``spec``; ``var`` is dropped."""
    l = spec.template_index(template)
    P = spec.templates[l]
    tagged = product(P, VarBinding.from_template(P, var))
    tmpl = add_mutex_guards(tagged)
    if prune:
        tmpl = prune_unreachable(tmpl)
    others = []
    for k, t in enumerate(spec.templates):
        if k == l:
            others.append(tmpl)
            continue
        if any(op.var == var for tr in t.transitions for op in tr.var_ops):
            raise ValueError(f"{t.name} also uses {var}; only one template may be abstracted")
        others.append(t)
    variables = tuple(v for v in spec.variables if v != var)
    return replace(spec, templates=tuple(others), variables=variables, source=None)


def tagged_states(tmpl: Template) -> frozenset:
    return frozenset(s for s in tmpl.states if (sv := split_view(s)) is not None and sv[1] == MYPID)


# ---------------------------------------------------------------------------
# simulation of the concrete variable by the views


@dataclass
class SimulationResult:
    holds: bool
    explored: int
    step: str | None = None

    def __bool__(self):
        return self.holds


def _grid(spec: NetworkSpec, grain: int) -> NetworkSpec:
    """Integer model on the time grid ``1/grain`` with strict bounds closed."""
    s = scale_to_integers(spec, [Fraction(1, grain)])
    return close_strict_constraints(s)


def simulation_check(concrete: NetworkSpec, abstract: NetworkSpec, n: int, template: str | None = None,
                     var: str | None = None, grain: int = 1) -> SimulationResult:
    """Does the view network simulate ``n`` concrete processes plus ``v``?

    Both sides are explored on the integer time grid of the ``grain``-scaled
    model.  A concrete configuration maps to the abstract one with the same
    clocks where process ``i`` sits in ``state_mypid`` iff ``v = i``.  Every
    concrete step must be matched from the image of its source: a delay by
    the same delay, a transition of process ``i`` by that transition of
    instance ``i`` surrounded by zero-time overwrite moves.
    """
    if template is None:
        template = concrete.templates[0].name
    if var is None:
        var = concrete.variables[0]
    if len(concrete.templates) != 1 or len(abstract.templates) != 1:
        raise ValueError("simulation_check handles one-template networks")
    cspec, aspec = _grid(concrete, grain), _grid(abstract, grain)
    cnet, anet = Network(cspec, (n,)), Network(aspec, (n,))
    ceng, aeng = DiscreteEngine(cnet), DiscreteEngine(anet)
    if ceng.caps != aeng.caps:
        raise ValueError("concrete and abstract templates compare clocks to different constants")
    ctmpl, atmpl = cnet.templates[0], anet.templates[0]
    aidx = atmpl.sidx

    def alpha(node, v):
        states = []
        for i, s in enumerate(node[0]):
            name = view_state(ctmpl.states[s], MYPID if v == i + 1 else DIFF)
            if name not in aidx:
                return None, name
            states.append(aidx[name])
        return (tuple(states), node[1], node[2]), None

    def is_overwrite(t):
        src, dst = split_view(atmpl.states[t.source]), split_view(atmpl.states[t.target])
        return src is not None and dst is not None and src[0] == dst[0] and not t.resets

    def matches(a, idx, ctr, target):
        """BFS over zero-time abstract moves: overwrites plus one move of ``idx``."""
        start = (a, False)
        seen = {start}
        queue = deque([start])
        while queue:
            node, done = queue.popleft()
            if done and node == target:
                return True
            for j, s in enumerate(node[0]):
                for t in atmpl.out[s]:
                    ov = is_overwrite(t)
                    main = (not done and j == idx and not ov
                            and split_view(atmpl.states[t.source])[0] == ctmpl.states[ctr.source]
                            and split_view(atmpl.states[t.target])[0] == ctmpl.states[ctr.target]
                            and t.resets == ctr.resets)
                    if not (ov or main):
                        continue
                    nxt = aeng.fire_node(node, j, t)
                    if nxt is None:
                        continue
                    key = (nxt, done or main)
                    if key not in seen:
                        seen.add(key)
                        queue.append(key)
        return False

    def reads_ok(ops, idx, v):
        for op in ops:
            if op.var != var or op.kind != "read":
                continue
            want = idx + 1 if op.value == "PID" else 0
            if (v == want) != (op.op == "=="):
                return False
        return True

    def written(ops, idx, v):
        for op in ops:
            if op.var == var and op.kind == "write":
                v = idx + 1 if op.value == "PID" else 0
        return v

    def describe(node, v, what):
        names = ", ".join(f"{ctmpl.states[s]}" for s in node[0])
        return f"from ({names}; clocks {list(node[1])}; {var}={v}): {what}"

    init = (ceng.initial_node, 0)
    a0, bad = alpha(*init)
    if a0 is None:
        return SimulationResult(False, 0, f"initial configuration maps to missing state {bad}")
    seen = {init}
    queue = deque([init])
    while queue:
        node, v = queue.popleft()
        a, _ = alpha(node, v)
        succs = []
        for idx, s in enumerate(node[0]):
            for t in ctmpl.out[s]:
                if not reads_ok(t.model.var_ops, idx, v):
                    continue
                nxt = ceng.fire_node(node, idx, t)
                if nxt is not None:
                    succs.append((("sync", idx, t), nxt, written(t.model.var_ops, idx, v)))
        d = ceng.delay_node(node)
        if d is not None:
            succs.append((("delay",), d, v))
        for label, nxt, nv in succs:
            target, bad = alpha(nxt, nv)
            if target is None:
                return SimulationResult(False, len(seen), describe(node, v, f"no abstract state {bad}"))
            if label[0] == "delay":
                ok = aeng.delay_node(a) == target
                what = "delay 1"
            else:
                idx, t = label[1], label[2]
                ok = matches(a, idx, t, target)
                what = f"{cnet.instance_name(idx)}: {ctmpl.states[t.source]} -> {ctmpl.states[t.target]}"
            if not ok:
                return SimulationResult(False, len(seen), describe(node, v, f"unmatched step {what}"))
            key = (nxt, nv)
            if key not in seen:
                seen.add(key)
                queue.append(key)
    return SimulationResult(True, len(seen))


def tag_exclusion(spec: NetworkSpec, sizes, engine: str = "zone"):
    """At most one instance in a tagged state, as a checker verdict."""
    from .checker import check
    from .logic import Property, SAnd, SAtom, SNot, SOr

    (tmpl,) = spec.templates
    tags = sorted(tagged_states(tmpl))
    if not tags:
        raise ValueError("template has no *_mypid states")

    def tagged(var):
        atoms = tuple(SAtom(s, var) for s in tags)
        return atoms[0] if len(atoms) == 1 else SOr(atoms)

    prop = Property(
        binders=(("i", tmpl.name), ("j", tmpl.name)),
        quantifier="A",
        op="G",
        right=SNot(SAnd((tagged("i"), tagged("j")))),
        distinct=frozenset({frozenset(("i", "j"))}),
    )
    return check(spec, sizes, prop, engine=engine)
