"""Generated specs and ground formulas for cross-engine comparisons."""

from __future__ import annotations

import random

from pnta.lemmalab import GenParams, random_spec
from pnta.logic import Bound, GroundFormula, SAnd, SAtom, SNot, SOr, STrue

# closed, diagonal-free, <= 3 states, <= 2 clocks, constants <= 3
CORPUS_PARAMS = GenParams(max_states=3, max_clocks=2, max_constant=3)


def random_sizes(rng: random.Random) -> tuple:
    return (rng.randint(1, 2), rng.randint(0, 2))


def random_state_formula(rng: random.Random, spec, sizes):
    insts = [(l, i) for l, n in enumerate(sizes) for i in range(1, n + 1)]

    def lit():
        l, i = rng.choice(insts)
        a = SAtom(rng.choice(spec.templates[l].states[1:] or spec.templates[l].states), i, l)
        return SNot(a) if rng.random() < 0.25 else a

    k = rng.randint(1, 2)
    if k == 1:
        return lit()
    parts = (lit(), lit())
    return SAnd(parts) if rng.random() < 0.5 else SOr(parts)


def case(seed: int, ops=("EF", "AG", "EU"), bound: Bound | None = None):
    """(spec, sizes, ground formula) drawn from ``seed``."""
    rng = random.Random(seed)
    spec = random_spec(CORPUS_PARAMS, rng)
    sizes = random_sizes(rng)
    kind = rng.choice(ops)
    right = random_state_formula(rng, spec, sizes)
    bound = bound or Bound()
    if kind == "EF":
        f = GroundFormula("E", "F", right, None, bound)
    elif kind == "AG":
        f = GroundFormula("A", "G", right, None, bound)
    elif kind == "EU":
        left = random_state_formula(rng, spec, sizes) if rng.random() < 0.85 else STrue()
        f = GroundFormula("E", "U", right, left, bound)
    else:
        q, op = kind[:-1], kind[-1]
        left = random_state_formula(rng, spec, sizes) if op == "U" else None
        f = GroundFormula(q, op, right, left, bound)
    return spec, sizes, f
