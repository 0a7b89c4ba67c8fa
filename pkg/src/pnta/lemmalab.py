"""Randomized falsification of the monotonicity, bounding and truncation lemmas.

Each trial draws a small conjunctive-guard network and an existential
property about instance 1 of one template, evaluates it with the discrete
engine at the sizes the lemma relates, and records any broken implication.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from .checker import check
from .cutoff import cutoff_values
from .logic import Bound, Property, SAnd, SAtom, SNot, SOr
from .model import Atom, ConjunctiveGuard, NetworkSpec, Template, Transition, conj, validate_network

SUITES = ("mono", "bound", "trunc")
SUMMARY_HEADER = (
    "# properties sampled: E, Einf and Efin with one timed F/G/U layer over instance 1\n"
    "# of one template (the implemented fragment, not every formula the lemmas cover)"
)


@dataclass(frozen=True)
class GenParams:
    seed: int = 0
    max_states: int = 3
    max_clocks: int = 1
    max_constant: int = 2
    density: float = 0.35
    peer_prob: float = 0.4
    templates: int = 2
    invariant_prob: float = 0.3

    def __post_init__(self):
        if not 1 <= self.max_states <= 4:
            raise ValueError("max_states must be in [1, 4]")
        if not 0 <= self.max_clocks <= 2:
            raise ValueError("max_clocks must be in [0, 2]")
        if not 0 <= self.max_constant <= 3:
            raise ValueError("max_constant must be in [0, 3]")
        if self.templates not in (1, 2):
            raise ValueError("one or two templates")


def _random_template(rng: random.Random, p: GenParams, name: str, names: list[str], nstates: list[int]) -> Template:
    me = names.index(name)
    ns = nstates[me]
    states = tuple(f"s{k}" for k in range(ns))
    nclocks = 0 if p.max_clocks == 0 or rng.random() < 0.15 else rng.randint(1, p.max_clocks)
    clocks = tuple(("x", "y")[:nclocks])
    invariants = {}
    for s in states[1:]:
        if clocks and rng.random() < p.invariant_prob:
            invariants[s] = Atom(rng.choice(clocks), "<=", Fraction(rng.randint(1, max(1, p.max_constant))))
    pairs = [(s, t) for s in states for t in states if rng.random() < p.density]
    if p.density > 0:
        # keep every state reachable in the template graph
        for k in range(1, ns):
            pairs.append((states[rng.randrange(k)], states[k]))
    trans = []
    for s, t in dict.fromkeys(pairs):
        atoms = []
        for _ in range(rng.randint(0, 2) if clocks else 0):
            atoms.append(Atom(rng.choice(clocks), rng.choice(("<=", ">=", "==")),
                              Fraction(rng.randint(0, p.max_constant))))
        resets = tuple(c for c in clocks if rng.random() < 0.5)
        allowed = {}
        for k, other in enumerate(names):
            if rng.random() < p.peer_prob:
                pool = [f"s{j}" for j in range(1, nstates[k])]
                allowed[other] = {"s0"} | {q for q in pool if rng.random() < 0.5}
        trans.append(Transition(s, t, conj(atoms), resets, ConjunctiveGuard.of(allowed)))
    return Template(name, states, "s0", clocks, tuple(trans), invariants)


def random_spec(p: GenParams, rng: random.Random | None = None, max_states: tuple | None = None) -> NetworkSpec:
    """Deterministic in ``p.seed`` (or in ``rng`` when one is passed)."""
    rng = rng or random.Random(p.seed)
    names = [f"T{k + 1}" for k in range(p.templates)]
    caps = max_states or (p.max_states,) * p.templates
    nstates = [rng.randint(min(2, c, p.max_states), min(p.max_states, c)) for c in caps]
    templates = tuple(_random_template(rng, p, n, names, nstates) for n in names)
    spec = NetworkSpec(templates, {})
    assert not validate_network(spec), validate_network(spec)
    return spec


def _literal(rng, state: str, l: int):
    a = SAtom(state, 1, l)
    return SNot(a) if rng.random() < 0.3 else a


def _state_formula(rng, tmpl: Template, l: int):
    k = min(len(tmpl.states), rng.randint(1, 2))
    pool = list(tmpl.states[1:]) if k == 1 and len(tmpl.states) > 1 else list(tmpl.states)
    lits = tuple(_literal(rng, s, l) for s in rng.sample(pool, k))
    if k == 1:
        return lits[0]
    return SAnd(lits) if rng.random() < 0.5 else SOr(lits)


def random_property(rng: random.Random, spec: NetworkSpec, l: int, quantifiers=("E", "Einf", "Efin"),
                    ops=("F", "G", "U")) -> Property:
    tmpl = spec.templates[l]
    q = rng.choice(quantifiers)
    op = "F" if q == "Efin" else rng.choice(ops)
    bound = Bound()
    if rng.random() < 0.3:
        bound = Bound(rng.choice(("<=", ">=", "==")), rng.randint(0, 3))
    right = _state_formula(rng, tmpl, l)
    left = _state_formula(rng, tmpl, l) if op == "U" else None
    return Property((), q, op, right, left, bound)


@dataclass
class Violation:
    trial: int
    seed: int
    spec: NetworkSpec
    prop: Property
    verdicts: dict

    def text(self) -> str:
        from .textio import print_model

        lines = [f"violation in trial {self.trial} (seed {self.seed})", f"property: {self.prop}"]
        for sizes, v in self.verdicts.items():
            lines.append(f"  sizes {sizes}: {'true' if v else 'false'}")
        lines.append(print_model(self.spec))
        return "\n".join(lines)


@dataclass
class SuiteReport:
    suite: str
    trials: int
    seed: int
    violations: list = field(default_factory=list)
    checks: int = 0
    wall_time: float = 0.0

    @property
    def summary(self) -> str:
        return f"violations={len(self.violations)} trials={self.trials} seed={self.seed}"

    def text(self) -> str:
        lines = [f"# lemma suite {self.suite}", SUMMARY_HEADER]
        for v in self.violations:
            lines.append(v.text())
        lines.append(f"# {self.checks} verdicts in {self.wall_time:.1f}s")
        lines.append(self.summary)
        return "\n".join(lines) + "\n"


def _verdict(spec, sizes, prop) -> bool:
    return check(spec, sizes, prop, engine="discrete", want_witness=False).truth


def _sizes(l: int, own: int, other: int) -> tuple:
    # template l gets ``own`` instances, the other template ``other``
    return (own, other) if l == 0 else (other, own)


def _trial(suite: str, trial: int, seed: int, p: GenParams):
    rng = random.Random(seed)
    if suite == "mono":
        spec = random_spec(replace(p, seed=seed), rng)
        l = rng.randrange(len(spec.templates))
        prop = random_property(rng, spec, l)
        # grow the last template, the target's instance 1 stays put
        grow = len(spec.templates) - 1
        verdicts = {}
        for n in range(1, 5):
            sizes = tuple(n if k == grow else 1 for k in range(len(spec.templates)))
            verdicts[sizes] = _verdict(spec, sizes, prop)
        vals = list(verdicts.values())
        broken = any(a and not b for a, b in zip(vals, vals[1:]))
        return spec, prop, verdicts, broken
    if suite == "bound":
        # the size above the cutoff is explored explicitly, so |U_2| <= 2
        spec = random_spec(replace(p, seed=seed, templates=2), rng, max_states=(p.max_states, 2))
        prop = random_property(rng, spec, 1)
        counts = [len(t.states) for t in spec.templates]
        c2 = cutoff_values(counts, prop.quantifier, {1})[1]
        n = c2 + 1
        verdicts = {(1, n): _verdict(spec, (1, n), prop), (1, c2): _verdict(spec, (1, c2), prop)}
        broken = verdicts[(1, n)] and not verdicts[(1, c2)]
        return spec, prop, verdicts, broken
    if suite == "trunc":
        spec = random_spec(replace(p, seed=seed, templates=2), rng)
        l = rng.randrange(2)
        prop = random_property(rng, spec, l, quantifiers=("E",), ops=("F",))
        counts = [len(t.states) for t in spec.templates]
        cut = cutoff_values(counts, "E", {l})
        big = rng.randrange(2)
        sizes = []
        for k in range(2):
            lo = 1 if k == l else 0
            if k == big:
                sizes.append(cut[k] + rng.randint(1, 2))
            else:
                sizes.append(rng.randint(lo, cut[k]))
        sizes = tuple(sizes)
        small = tuple(min(n, c) for n, c in zip(sizes, cut))
        verdicts = {sizes: _verdict(spec, sizes, prop), small: _verdict(spec, small, prop)}
        broken = verdicts[sizes] != verdicts[small]
        return spec, prop, verdicts, broken
    raise ValueError(f"unknown suite {suite!r} (choose from {', '.join(SUITES)})")


def run_suite(suite: str, p: GenParams | None = None, trials: int = 50, dump: str | Path | None = None,
              progress=None) -> SuiteReport:
    """Run ``trials`` trials; trial ``t`` is reproducible from seed ``p.seed + t``."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r} (choose from {', '.join(SUITES)})")
    p = p or GenParams()
    if suite == "trunc":
        # truncation compares sizes beyond the cutoff; small templates keep that explicit
        p = replace(p, max_states=min(p.max_states, 2))
    t0 = time.perf_counter()
    report = SuiteReport(suite, trials, p.seed)
    for t in range(trials):
        seed = p.seed + t
        spec, prop, verdicts, broken = _trial(suite, t, seed, p)
        report.checks += len(verdicts)
        if broken:
            v = Violation(t, seed, spec, prop, verdicts)
            report.violations.append(v)
            if dump is not None:
                path = Path(dump)
                path.mkdir(parents=True, exist_ok=True)
                (path / f"{suite}-{seed}.txt").write_text(v.text() + "\n")
        if progress is not None:
            progress(t, verdicts, broken)
    report.wall_time = time.perf_counter() - t0
    return report
