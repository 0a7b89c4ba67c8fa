"""Concrete operational semantics of a network instantiation.

:class:`Network` compiles a :class:`~pnta.model.NetworkSpec` at a fixed size
vector.  Instances are laid out flat, template by template; a configuration is
a tuple of state indices plus a flat tuple of clock values.  The same module
hosts the digitized explicit-state engine used as a ground-truth oracle for
closed models.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .model import (
    Atom,
    ModelError,
    NetworkSpec,
    SizeVector,
    Transition,
    as_sizes,
    compare,
    normalize_constraints,
    to_dnf,
    validate_network,
)


class InvalidModel(ModelError):
    def __init__(self, diagnostics):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


class EngineLimitation(Exception):
    """A model or query the selected engine cannot handle (CLI exit code 3)."""


class StrictConstraintUnsupported(EngineLimitation):
    pass


class InvariantViolated(Exception):
    def __init__(self, template: str, instance: int, sup_delay: Fraction):
        super().__init__(
            f"invariant of {template}[{instance}] allows delays up to {sup_delay} only"
        )
        self.template = template
        self.instance = instance
        self.sup_delay = sup_delay


class RunClass(enum.Enum):
    INFINITE = "infinite"
    DEADLOCKED = "deadlocked"
    FINITE_PREFIX = "finite-prefix"


# compiled atoms: (0, clock, op, value) or (1, left clock, op, right clock);
# clock indices are local to the instance.
CONST, DIAG = 0, 1


@dataclass(frozen=True)
class CTrans:
    index: int
    source: int
    target: int
    guard: tuple
    resets: tuple
    allowed: tuple  # per template: frozenset of state indices, or None
    model: Transition = field(compare=False)


class CTemplate:
    def __init__(self, spec: NetworkSpec, l: int):
        t = spec.templates[l]
        self.name = t.name
        self.states = list(t.states)
        self.sidx = {s: i for i, s in enumerate(self.states)}
        self.init = self.sidx[t.initial]
        self.clocks = list(t.clocks)
        self.cidx = {c: i for i, c in enumerate(self.clocks)}
        self.inv: list = []
        for s in self.states:
            dnf = to_dnf(t.invariant(s))
            # normalize_constraints already rejected non-convex invariants
            self.inv.append(None if not dnf else tuple(self._atom(spec, a) for a in dnf[0]))
        self.out: list[list[CTrans]] = [[] for _ in self.states]
        names = [u.name for u in spec.templates]
        for k, tr in enumerate(t.transitions):
            dnf = to_dnf(tr.guard)
            if not dnf:
                continue
            allowed = []
            for h, other in enumerate(spec.templates):
                a = tr.cguard.allowed_for(names[h])
                allowed.append(None if a is None else frozenset(other.states.index(s) for s in a))
            ct = CTrans(
                index=k,
                source=self.sidx[tr.source],
                target=self.sidx[tr.target],
                guard=tuple(self._atom(spec, a) for a in dnf[0]),
                resets=tuple(sorted(self.cidx[c] for c in tr.resets)),
                allowed=tuple(allowed),
                model=tr,
            )
            self.out[ct.source].append(ct)

    def _atom(self, spec, a):
        if isinstance(a, Atom):
            return (CONST, self.cidx[a.clock], a.op, Fraction(spec.value(a.value)))
        return (DIAG, self.cidx[a.left], a.op, self.cidx[a.right])


def eval_atoms(atoms, vals, off: int) -> bool:
    for kind, a, op, b in atoms:
        rhs = b if kind == CONST else vals[off + b]
        if not compare(vals[off + a], op, rhs):
            return False
    return True


@dataclass(frozen=True)
class Configuration:
    states: tuple
    clocks: tuple

    def key(self):
        return (self.states, self.clocks)


class Network:
    """A spec instantiated at ``sizes``, ready for step computations.

    With ``formula_clock`` an extra never-reset clock ``z`` is appended to the
    flat clock vector (it always equals the elapsed time).
    """

    def __init__(self, spec: NetworkSpec, sizes, formula_clock: bool = False, check: bool = True):
        sizes = as_sizes(sizes)
        if len(sizes) != len(spec.templates):
            raise ValueError(f"size vector {sizes} does not match {len(spec.templates)} templates")
        if check:
            diags = validate_network(spec)
            if diags:
                raise InvalidModel(diags)
        self.spec = normalize_constraints(spec)
        self.sizes = sizes
        self.templates = [CTemplate(self.spec, l) for l in range(len(spec.templates))]
        self.instances: list[tuple[int, int]] = []
        self.start: list[int] = []
        self.offset: list[int] = []
        off = 0
        for l, n in enumerate(sizes):
            self.start.append(len(self.instances))
            for i in range(1, n + 1):
                self.instances.append((l, i))
                self.offset.append(off)
                off += len(self.templates[l].clocks)
        self.start.append(len(self.instances))
        self.z = off if formula_clock else None
        self.num_clocks = off + (1 if formula_clock else 0)

    # -- naming helpers ---------------------------------------------------

    def flat(self, l: int, i: int) -> int:
        if not 1 <= i <= self.sizes[l]:
            raise IndexError(f"{self.templates[l].name}[{i}] does not exist at sizes {self.sizes}")
        return self.start[l] + i - 1

    def tmpl(self, idx: int) -> CTemplate:
        return self.templates[self.instances[idx][0]]

    def instance_name(self, idx: int) -> str:
        l, i = self.instances[idx]
        return f"{self.templates[l].name}[{i}]"

    def state_name(self, idx: int, s: int) -> str:
        return self.tmpl(idx).states[s]

    def clock_names(self) -> list[str]:
        names = []
        for idx in range(len(self.instances)):
            names.extend(f"{self.instance_name(idx)}.{c}" for c in self.tmpl(idx).clocks)
        if self.z is not None:
            names.append("z")
        return names

    def local_clocks(self, config: Configuration, idx: int) -> dict:
        t, off = self.tmpl(idx), self.offset[idx]
        return {c: config.clocks[off + k] for k, c in enumerate(t.clocks)}

    # -- configurations ---------------------------------------------------

    def make_config(self, states, clocks) -> Configuration:
        c = Configuration(tuple(states), tuple(clocks))
        if __debug__:
            bad = self.invariant_failure(c)
            if bad is not None:
                raise AssertionError(f"configuration violates the invariant of {self.instance_name(bad)}")
        return c

    def invariant_failure(self, c: Configuration):
        for idx, s in enumerate(c.states):
            inv = self.tmpl(idx).inv[s]
            if inv is None or not eval_atoms(inv, c.clocks, self.offset[idx]):
                return idx
        return None

    def initial_configuration(self) -> Configuration:
        states = [self.templates[l].init for l, _ in self.instances]
        return self.make_config(states, [Fraction(0)] * self.num_clocks)

    def eval_guard(self, states: Sequence[int], allowed: tuple, owner: int) -> bool:
        for h, a in enumerate(allowed):
            if a is None:
                continue
            for j in range(self.start[h], self.start[h + 1]):
                if j != owner and states[j] not in a:
                    return False
        return True

    def sup_delay(self, c: Configuration, idx: int):
        """(supremum admissible delay, attained?) for one instance; None = unbounded."""
        best, attained = None, True
        off = self.offset[idx]
        for kind, a, op, b in self.tmpl(idx).inv[c.states[idx]] or ():
            if kind != CONST or op in (">", ">="):
                continue
            room = b - c.clocks[off + a]
            if op == "==":
                room, strict = Fraction(0), False
            else:
                strict = op == "<"
            if best is None or room < best or (room == best and strict):
                best, attained = room, not strict
        return best, attained

    def delay_successor(self, c: Configuration, d) -> Configuration:
        d = Fraction(d)
        if d <= 0:
            raise ValueError("a delay step needs d > 0")
        for idx in range(len(self.instances)):
            sup, attained = self.sup_delay(c, idx)
            if sup is not None and (d > sup or (d == sup and not attained)):
                l, i = self.instances[idx]
                raise InvariantViolated(self.templates[l].name, i, sup)
        return self.make_config(c.states, tuple(v + d for v in c.clocks))

    def can_delay(self, c: Configuration) -> bool:
        for idx in range(len(self.instances)):
            sup, _ = self.sup_delay(c, idx)
            if sup is not None and sup <= 0:
                return False
        return True

    def fire(self, c: Configuration, idx: int, t: CTrans):
        """Successor of ``c`` when instance ``idx`` takes ``t``, or None if disabled."""
        tmpl, off = self.tmpl(idx), self.offset[idx]
        if c.states[idx] != t.source:
            return None
        if not eval_atoms(t.guard, c.clocks, off):
            return None
        if not self.eval_guard(c.states, t.allowed, idx):
            return None
        clocks = list(c.clocks)
        for r in t.resets:
            clocks[off + r] = Fraction(0)
        inv = tmpl.inv[t.target]
        if inv is None or not eval_atoms(inv, clocks, off):
            return None
        states = list(c.states)
        states[idx] = t.target
        return self.make_config(states, clocks)

    def sync_successors(self, c: Configuration) -> list:
        out = []
        for idx, s in enumerate(c.states):
            for t in self.tmpl(idx).out[s]:
                nxt = self.fire(c, idx, t)
                if nxt is not None:
                    out.append((self.instances[idx], t, nxt))
        return out

    def is_deadlocked(self, c: Configuration) -> bool:
        return not self.sync_successors(c) and not self.can_delay(c)


# Free-function forms of the step operations.


def initial_configuration(spec: NetworkSpec, sizes) -> Configuration:
    return Network(spec, sizes).initial_configuration()


def eval_guard(net: Network, config: Configuration, allowed: tuple, owner: tuple) -> bool:
    return net.eval_guard(config.states, allowed, net.flat(*owner))


def delay_successor(net: Network, config: Configuration, d) -> Configuration:
    return net.delay_successor(config, d)


def sync_successors(net: Network, config: Configuration) -> list:
    return net.sync_successors(config)


def is_deadlocked(net: Network, config: Configuration) -> bool:
    return net.is_deadlocked(config)


# ---------------------------------------------------------------------------
# runs


@dataclass(frozen=True)
class Step:
    kind: str  # "delay" or "sync"
    delay: Fraction = Fraction(0)
    owner: int | None = None
    trans: CTrans | None = None


@dataclass
class Run:
    net: Network
    configs: list
    times: list
    steps: list
    kind: RunClass = RunClass.FINITE_PREFIX
    cycle_start: int | None = None  # config index where the repeated suffix begins

    def __len__(self):
        return len(self.steps)

    @property
    def final(self) -> Configuration:
        return self.configs[-1]


class RunBuilder:
    """Accumulate steps, coalescing consecutive delays."""

    def __init__(self, net: Network, start: Configuration | None = None):
        self.net = net
        self.configs = [start or net.initial_configuration()]
        self.times = [Fraction(0)]
        self.steps: list[Step] = []

    @property
    def current(self) -> Configuration:
        return self.configs[-1]

    def delay(self, d) -> None:
        d = Fraction(d)
        if d == 0:
            return
        if self.steps and self.steps[-1].kind == "delay":
            prev = self.steps.pop()
            self.configs.pop()
            self.times.pop()
            d += prev.delay
        base = self.configs[-1]
        self.configs.append(self.net.delay_successor(base, d))
        self.times.append(self.times[-1] + d)
        self.steps.append(Step("delay", d))

    def sync(self, idx: int, t: CTrans) -> None:
        nxt = self.net.fire(self.current, idx, t)
        if nxt is None:
            raise ValueError(f"{self.net.instance_name(idx)} cannot take transition {t.index} here")
        self.configs.append(nxt)
        self.times.append(self.times[-1])
        self.steps.append(Step("sync", owner=idx, trans=t))

    def mark(self) -> int:
        return len(self.configs) - 1

    def build(self, kind=RunClass.FINITE_PREFIX, cycle_start=None) -> Run:
        return Run(self.net, self.configs, self.times, self.steps, kind, cycle_start)


def replay(run: Run) -> bool:
    """Re-execute every step of ``run`` and compare configurations exactly.

    A lasso must close on the discrete state of its cycle entry; a deadlock
    run must end in a deadlocked configuration.
    """
    net = run.net
    if run.configs[0] != net.initial_configuration():
        return False
    for k, step in enumerate(run.steps):
        cur = run.configs[k]
        if step.kind == "delay":
            if step.delay <= 0:
                return False
            try:
                nxt = net.delay_successor(cur, step.delay)
            except InvariantViolated:
                return False
            if run.times[k + 1] != run.times[k] + step.delay:
                return False
        else:
            nxt = net.fire(cur, step.owner, step.trans)
            if nxt is None or run.times[k + 1] != run.times[k]:
                return False
            changed = [j for j in range(len(cur.states)) if cur.states[j] != nxt.states[j]
                       or net.local_clocks(cur, j) != net.local_clocks(nxt, j)]
            if any(j != step.owner for j in changed):
                return False
        if nxt != run.configs[k + 1]:
            return False
    if run.kind is RunClass.DEADLOCKED and not net.is_deadlocked(run.final):
        return False
    if run.kind is RunClass.INFINITE:
        if run.cycle_start is None:
            return False
        c = run.cycle_start
        if c == len(run.configs) - 1:
            # trailing divergence: idling forever from the final configuration
            return net.can_delay(run.final) and all(
                net.sup_delay(run.final, j)[0] is None for j in range(len(net.instances))
            )
        if run.configs[c].states != run.final.states:
            return False
    return True


def random_run(net: Network, steps: int, rng, max_delay=Fraction(2)) -> Run:
    """A random finite run mixing rational delays and synchronisations."""
    b = RunBuilder(net)
    for _ in range(steps):
        cur = b.current
        succ = net.sync_successors(cur)
        choices = []
        if succ:
            choices.append("sync")
        sups = [net.sup_delay(cur, j) for j in range(len(net.instances))]
        bounded = [s for s in sups if s[0] is not None]
        room = min((s[0] for s in bounded), default=None)
        if room is None or room > 0:
            choices.append("delay")
        if not choices:
            return b.build(RunClass.DEADLOCKED)
        if rng.choice(choices) == "sync":
            (l, i), t, _ = rng.choice(succ)
            b.sync(net.flat(l, i), t)
        else:
            cap = max_delay if room is None else min(max_delay, room)
            d = Fraction(rng.randint(1, 8), 8) * cap
            if room is not None and d == room and any(s[0] == room and not s[1] for s in bounded):
                d = room / 2
            b.delay(d)
    return b.build()


# ---------------------------------------------------------------------------
# digitized explicit-state engine


def active_clocks(tmpl) -> list[frozenset]:
    """Per state: local clocks whose value may still matter (fixpoint)."""
    act = [set() for _ in tmpl.states]
    for s in range(len(tmpl.states)):
        for kind, a, op, b in tmpl.inv[s] or ():
            act[s].add(a)
        for t in tmpl.out[s]:
            for kind, a, op, b in t.guard:
                act[s].add(a)
            # the target invariant is checked right after the resets
            for kind, a, op, b in tmpl.inv[t.target] or ():
                if a not in t.resets:
                    act[s].add(a)
    changed = True
    while changed:
        changed = False
        for s in range(len(tmpl.states)):
            for t in tmpl.out[s]:
                extra = act[t.target] - set(t.resets) - act[s]
                if extra:
                    act[s] |= extra
                    changed = True
    return [frozenset(a) for a in act]



def _bound_pieces_ok(z: int, cons) -> bool:
    return all(compare(z, op, q) for op, q in cons)


class DiscreteEngine:
    """Integer-time exploration of a closed, integer-scaled network.

    A node is ``(states, clocks)`` with every clock capped at its maximal
    constant + 1, plus a tuple of signs ``sign(x - y)`` for clock pairs that
    appear in diagonal constraints.  With ``bound`` a formula clock tracks
    elapsed time (capped at the bound + 1).

    ``pinned`` enables symmetry reduction: unpinned instances of a template
    are kept sorted.  Only verdicts are available then, not witnesses.
    """

    name = "discrete"

    def __init__(self, net: Network, bound=None, pinned: Iterable[int] | None = None,
                 reduce_inactive: bool = True):
        self.net = net
        spec = net.spec
        for t in spec.templates:
            cs = list(t.invariants.values()) + [tr.guard for tr in t.transitions]
            for c in cs:
                for conj_ in to_dnf(c):
                    for a in conj_:
                        if isinstance(a, Atom):
                            if a.op in ("<", ">"):
                                raise StrictConstraintUnsupported(
                                    f"{t.name}: strict constraint '{a}' (the discrete engine needs closed constraints)")
                            if Fraction(spec.value(a.value)).denominator != 1:
                                raise EngineLimitation("the discrete engine needs an integer-scaled model")
        self.bound = bound
        if bound is not None:
            op, q = bound
            if op in ("<", ">"):
                raise StrictConstraintUnsupported(f"strict time bound {op}{q}")
            if Fraction(q).denominator != 1:
                raise EngineLimitation("the discrete engine needs integer time bounds")
        caps = []
        for idx in range(len(net.instances)):
            t = net.tmpl(idx)
            m = [0] * len(t.clocks)
            for s in range(len(t.states)):
                for kind, a, op, b in t.inv[s] or ():
                    if kind == CONST:
                        m[a] = max(m[a], int(b))
                for tr in t.out[s]:
                    for kind, a, op, b in tr.guard:
                        if kind == CONST:
                            m[a] = max(m[a], int(b))
            caps.extend(x + 1 for x in m)
        self.zi = None
        if bound is not None:
            self.zi = len(caps)
            caps.append(int(bound[1]) + 1)
        self.caps = tuple(caps)
        # diagonal pairs per instance, as global clock index pairs
        self.pairs: list[tuple[int, int]] = []
        self.pair_index: dict = {}
        for idx in range(len(net.instances)):
            t, off = net.tmpl(idx), net.offset[idx]
            seen = set()
            for s in range(len(t.states)):
                atoms = list(t.inv[s] or ())
                for tr in t.out[s]:
                    atoms.extend(tr.guard)
                for kind, a, op, b in atoms:
                    if kind == DIAG:
                        key = (min(a, b), max(a, b))
                        if key not in seen:
                            seen.add(key)
                            self.pair_index[(idx,) + key] = len(self.pairs)
                            self.pairs.append((off + key[0], off + key[1]))
        self.pinned = None if pinned is None else frozenset(pinned)
        # clocks whose value no longer matters are held at 0
        self.idle: list[list[tuple]] = []
        acts = [active_clocks(t) for t in net.templates]
        for idx, (l, _i) in enumerate(net.instances):
            t, off = net.templates[l], net.offset[idx]
            self.idle.append([
                tuple(off + c for c in range(len(t.clocks)) if c not in acts[l][s])
                if reduce_inactive and not self.pairs else ()
                for s in range(len(t.states))
            ])
        self.initial_node = self._canon((
            tuple(net.templates[l].init for l, _ in net.instances),
            tuple([0] * len(caps)),
            tuple([0] * len(self.pairs)),
        ))

    # -- node helpers -------------------------------------------------------

    def states(self, node):
        return node[0]

    def _z(self, node):
        return node[1][self.zi] if self.zi is not None else 0

    def _canon(self, node):
        if self.pinned is None:
            return node
        net = self.net
        states, clocks, signs = node
        if self.pairs:
            raise EngineLimitation("symmetry reduction is not combined with diagonal constraints")
        new_states, new_clocks = list(states), list(clocks)
        for l in range(len(net.templates)):
            free = [j for j in range(net.start[l], net.start[l + 1]) if j not in self.pinned]
            if len(free) < 2:
                continue
            width = len(net.templates[l].clocks)
            locs = sorted(
                (states[j], clocks[net.offset[j]: net.offset[j] + width]) for j in free
            )
            for j, (s, cl) in zip(free, locs):
                new_states[j] = s
                new_clocks[net.offset[j]: net.offset[j] + width] = cl
        return (tuple(new_states), tuple(new_clocks), signs)

    def _eval(self, atoms, node, idx) -> bool:
        clocks, signs = node[1], node[2]
        off = self.net.offset[idx]
        for kind, a, op, b in atoms:
            if kind == CONST:
                if not compare(clocks[off + a], op, b):
                    return False
            else:
                lo, hi = min(a, b), max(a, b)
                sgn = signs[self.pair_index[(idx, lo, hi)]]
                if a > b:
                    sgn = -sgn
                if not compare(sgn, op, 0):
                    return False
        return True

    def allowed_node(self, node, allowed) -> bool:
        if allowed is None:
            return True
        pieces = allowed(node[0])
        if pieces is None:
            return True
        z = self._z(node)
        return any(p is None or _bound_pieces_ok(z, p) for p in pieces)

    def initial(self, allowed=None):
        node = self.initial_node
        if not self.allowed_node(node, allowed):
            return []
        return [(node, node)]

    def delay_node(self, node):
        states, clocks, signs = node
        new = [min(v + 1, cap) for v, cap in zip(clocks, self.caps)]
        for idx, s in enumerate(states):
            for x in self.idle[idx][s]:
                new[x] = 0
        nxt = (states, tuple(new), signs)
        for idx, s in enumerate(states):
            inv = self.net.tmpl(idx).inv[s]
            if inv is None or not self._eval(inv, nxt, idx):
                return None
        return nxt

    def fire_node(self, node, idx, t: CTrans):
        states, clocks, signs = node
        net = self.net
        if not self._eval(t.guard, node, idx):
            return None
        if not net.eval_guard(states, t.allowed, idx):
            return None
        off = net.offset[idx]
        clocks = list(clocks)
        for r in t.resets:
            clocks[off + r] = 0
        if self.pairs and t.resets:
            signs = list(signs)
            for (key, p) in self.pair_index.items():
                if key[0] != idx:
                    continue
                ga, gb = off + key[1], off + key[2]
                va, vb = clocks[ga], clocks[gb]
                ra, rb = key[1] in t.resets, key[2] in t.resets
                if ra and rb:
                    signs[p] = 0
                elif ra:
                    signs[p] = 0 if vb == 0 else -1
                elif rb:
                    signs[p] = 0 if va == 0 else 1
            signs = tuple(signs)
        new_states = list(states)
        new_states[idx] = t.target
        for x in self.idle[idx][t.target]:
            clocks[x] = 0
        nxt = (tuple(new_states), tuple(clocks), signs)
        inv = net.tmpl(idx).inv[t.target]
        if inv is None or not self._eval(inv, nxt, idx):
            return None
        return nxt

    def successors(self, node, allowed=None):
        out = []
        net = self.net
        for idx, s in enumerate(node[0]):
            for t in net.tmpl(idx).out[s]:
                nxt = self.fire_node(node, idx, t)
                if nxt is not None:
                    nxt = self._canon(nxt)
                    if self.allowed_node(nxt, allowed):
                        out.append((("sync", idx, t), nxt, nxt))
        nxt = self.delay_node(node)
        if nxt is not None:
            nxt = self._canon(nxt)
            if self.allowed_node(nxt, allowed):
                out.append((("delay",), nxt, nxt))
        return out

    def meets(self, node, zcons) -> bool:
        return not zcons or _bound_pieces_ok(self._z(node), zcons)

    def restrict(self, node, zcons):
        return node if self.meets(node, zcons) else None

    def divergent(self, node) -> bool:
        # idling shows up as a delay self-loop once clocks are capped
        return False

    def deadlock(self, node):
        for idx, s in enumerate(node[0]):
            for t in self.net.tmpl(idx).out[s]:
                if self.fire_node(node, idx, t) is not None:
                    return None
        return None if self.delay_node(node) is not None else ()

    def concretize(self, path, final=None, tail=None) -> Run:
        """Turn a node path into an exact run.

        ``path`` is ``[(label, node), ...]`` starting with ``(None, initial)``;
        ``tail`` is ``("cycle", k)`` (path index where the loop starts),
        ``("deadlock",)`` or ``("diverge",)``.
        """
        if self.pinned is not None:
            raise EngineLimitation("witnesses are not available under symmetry reduction")
        b = RunBuilder(self.net)
        marks = [0]
        for label, _node in path[1:]:
            if label[0] == "delay":
                b.delay(1)
            elif label[0] == "sync":
                b.sync(label[1], label[2])
            marks.append(b.mark())
        return _finish(b, marks, tail)


def _finish(b: RunBuilder, marks, tail) -> Run:
    if tail is None:
        return b.build(RunClass.FINITE_PREFIX)
    if tail[0] == "deadlock":
        return b.build(RunClass.DEADLOCKED)
    if tail[0] == "diverge":
        start = b.mark()
        b.steps.append(Step("delay", Fraction(1)))
        b.configs.append(b.net.delay_successor(b.current, 1))
        b.times.append(b.times[-1] + 1)
        return b.build(RunClass.INFINITE, cycle_start=start)
    return b.build(RunClass.INFINITE, cycle_start=marks[tail[1]])


# ---------------------------------------------------------------------------
# oracle entry points


def _state_pred(net: Network, formula) -> Callable:
    from .logic import compile_state_formula

    return compile_state_formula(net, formula)


def discrete_reach(spec: NetworkSpec, sizes, target, time_bound=None) -> dict:
    """Explicit BFS for a ground state formula; returns ``reachable`` and ``witness``."""
    from . import search

    net = Network(spec, sizes, formula_clock=time_bound is not None)
    eng = DiscreteEngine(net, bound=time_bound)
    pred = _state_pred(net, target)
    zc = () if time_bound is None else ((time_bound[0], time_bound[1]),)
    hit = search.reach(eng, lambda node, entry: pred(eng.states(node)) and eng.meets(node, zc))
    if hit is None:
        return {"reachable": False, "witness": None}
    return {"reachable": True, "witness": eng.concretize(hit)}


def classify_runs(spec: NetworkSpec, sizes, avoid) -> dict:
    """Infinite / deadlocked runs of the digitized graph staying inside ``avoid``."""
    from . import search

    net = Network(spec, sizes)
    eng = DiscreteEngine(net)
    pred = _state_pred(net, avoid)
    allowed = lambda states: None if pred(states) else []
    graph = search.explore(eng, allowed)
    has_dead = any(eng.deadlock(n) is not None for n in graph.nodes)
    has_inf = graph.find_cycle() is not None
    return {"hasInfiniteAvoiding": has_inf, "hasDeadlockedAvoiding": has_dead}
