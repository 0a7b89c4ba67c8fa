"""Cutoff vectors and the parameterized verification loop."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from .checker import Verdict, check
from .logic import Property, check_combination
from .model import NetworkSpec, SizeVector


@dataclass(frozen=True)
class CutoffVector:
    values: tuple
    quantifier: str
    case: str  # "inf", "fin" or "maximal"
    indexed: frozenset  # names of templates bound by the property
    state_counts: tuple
    names: tuple

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __str__(self):
        return "(" + ",".join(str(c) for c in self.values) + ")"

    def provenance(self) -> str:
        rule = {
            "inf": "c = 2 for indexed templates, 1 otherwise",
            "fin": "c = 1 for every template",
            "maximal": "c = 2|U|+1 for indexed templates, 2|U| otherwise",
        }[self.case]
        lines = [f"cutoff: {self}", f"quantifier: {self.quantifier} ({rule})"]
        for name, n, c in zip(self.names, self.state_counts, self.values):
            tag = "indexed" if name in self.indexed else "not indexed"
            lines.append(f"  {name}: |U|={n}, {tag} -> {c}")
        return "\n".join(lines)


def _templates(templates):
    if isinstance(templates, NetworkSpec):
        return list(templates.templates)
    return list(templates)


def cutoff_values(state_counts, quantifier: str, indexed) -> tuple:
    """The cutoff as a pure function of state counts, quantifier and index set."""
    out = []
    for l, n in enumerate(state_counts):
        if quantifier in ("Ainf", "Einf"):
            out.append(2 if l in indexed else 1)
        elif quantifier in ("Afin", "Efin"):
            out.append(1)
        elif quantifier in ("A", "E"):
            out.append(2 * n + 1 if l in indexed else 2 * n)
        else:
            raise ValueError(f"unknown path quantifier {quantifier}")
    return tuple(out)


def compute_cutoff(templates, prop: Property) -> CutoffVector:
    tmpls = _templates(templates)
    names = tuple(t.name for t in tmpls)
    indexed = frozenset(t for _v, t in prop.binders)
    unknown = indexed - set(names)
    if unknown:
        raise KeyError(f"unknown template(s) {sorted(unknown)}")
    idx = {names.index(t) for t in indexed}
    counts = tuple(len(t.states) for t in tmpls)
    q = prop.quantifier
    case = "inf" if q.endswith("inf") else "fin" if q.endswith("fin") else "maximal"
    return CutoffVector(cutoff_values(counts, q, idx), q, case, indexed, counts, names)


def instantiable_minimum(prop: Property, template: str) -> int:
    """Fewest instances of ``template`` that give every binder a value."""
    vars_ = [v for v, t in prop.binders if t == template]
    if not vars_:
        return 0
    edges = [tuple(p) for p in prop.distinct if set(p) <= set(vars_)]
    for k in range(1, len(vars_) + 1):
        for colouring in itertools.product(range(k), repeat=len(vars_)):
            col = dict(zip(vars_, colouring))
            if all(col[a] != col[b] for a, b in edges):
                return k
    return len(vars_)


def enumerate_sizes(cutoff: CutoffVector, prop: Property) -> list[SizeVector]:
    ranges = []
    for name, c in zip(cutoff.names, cutoff.values):
        lo = instantiable_minimum(prop, name)
        # a cutoff below instantiability still needs one instantiable size
        ranges.append(range(lo, max(lo, c) + 1))
    return [SizeVector(v) for v in itertools.product(*ranges)]


@dataclass
class ParamVerdict:
    prop: Property
    engine: str
    cutoff: CutoffVector
    table: dict = field(default_factory=dict)
    truth: bool = True
    witness_sizes: SizeVector | None = None
    wall_time: float = 0.0

    @property
    def counterexample(self) -> Verdict | None:
        if self.witness_sizes is None:
            return None
        return self.table[self.witness_sizes]


def parameterized_check(spec: NetworkSpec, prop: Property, engine: str = "zone", fail_fast: bool = False,
                        imitl_strict: bool = False, progress=None) -> ParamVerdict:
    """Check ``prop`` at every size up to the cutoff; true iff all are."""
    t0 = time.perf_counter()
    check_combination(prop.quantifier, prop.op)
    cut = compute_cutoff(spec, prop)
    pv = ParamVerdict(prop, engine, cut)
    for sizes in enumerate_sizes(cut, prop):
        v = check(spec, sizes, prop, engine=engine, imitl_strict=imitl_strict)
        pv.table[sizes] = v
        if progress is not None:
            progress(sizes, v)
        if not v.truth:
            if pv.truth:
                pv.truth = False
                pv.witness_sizes = sizes
            if fail_fast:
                break
    pv.wall_time = time.perf_counter() - t0
    return pv
