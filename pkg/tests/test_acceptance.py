"""Acceptance criteria 1 to 7; each test prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines go to the
terminal even under output capture) or directly as a script.
"""

import itertools
import shutil
import subprocess
import sys
import time

import pytest

import corpus
import semantics_props as props
from conftest import PROP1, PROP2, PROP3
from pnta.abstraction import VarBinding, abstract_spec, product, simulation_check, tag_exclusion
from pnta.checker import check, check_formula
from pnta.cli import resolve_model
from pnta.cutoff import compute_cutoff, enumerate_sizes
from pnta.lemmalab import GenParams, run_suite
from pnta.logic import QUANTIFIERS, Property, SAtom
from pnta.model import Template
from pnta.semantics import replay
from pnta.textio import parse_property


@pytest.fixture
def report(request, capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} ({detail})", flush=True)
        assert ok, detail
    return emit


def test_criterion_1_cutoff_table(report):
    def expected(n, q, indexed):
        if q in ("Einf", "Ainf"):
            return 2 if indexed else 1
        if q in ("Efin", "Afin"):
            return 1
        return 2 * n + 1 if indexed else 2 * n

    checked = bad = 0
    for q in QUANTIFIERS:
        op = "F" if q == "Efin" else "G"
        for k in (1, 2, 3):
            names = [f"T{l}" for l in range(k)]
            for counts in itertools.product(range(1, 11), repeat=k):
                tmpls = [Template(nm, tuple(f"s{j}" for j in range(c)), "s0", (), ()) for nm, c in zip(names, counts)]
                for r in range(1, k + 1):
                    for idx in itertools.combinations(range(k), r):
                        binders = tuple((f"i{a}", names[a]) for a in idx)
                        p = Property(binders, q, op, SAtom("s0", "i0", names[idx[0]]))
                        got = compute_cutoff(tmpls, p).values
                        want = tuple(expected(c, q, l in idx) for l, c in enumerate(counts))
                        checked += 1
                        bad += got != want
    four = compute_cutoff([Template("P", ("a", "b", "c", "d"), "a", (), ())],
                          Property((("i", "P"),), "A", "G", SAtom("a", "i", "P"))).values
    report(1, bad == 0 and four == (9,), f"{checked} cases, {bad} wrong, |U|=4 -> {four}")


def test_criterion_2_fischer_size_nine(report):
    spec = resolve_model("fischer_reduced")
    results = []
    for text, want in ((PROP1, True), (PROP2, True), (PROP3, False)):
        t0 = time.perf_counter()
        v = check(spec, (9,), parse_property(text, spec))
        dt = time.perf_counter() - t0
        ok = v.truth == want and dt <= 15 * 60
        if not want:
            w = v.witness
            ok = ok and w is not None and w.cycle_start is not None and replay(w)
        results.append((ok, f"{'true' if v.truth else 'false'} in {dt:.1f}s"))
    report(2, all(ok for ok, _ in results), "; ".join(d for _, d in results))


def _pnta_command():
    exe = shutil.which("pnta")
    return [exe] if exe else [sys.executable, "-m", "pnta.cli"]


def test_criterion_3_sweep_without_sizes(report):
    t0 = time.perf_counter()
    proc = subprocess.run(_pnta_command() + ["check", "fischer_reduced", PROP2], capture_output=True, text=True,
                          timeout=45 * 60)
    dt = time.perf_counter() - t0
    rows = {}
    for line in proc.stdout.splitlines():
        parts = line.split()
        if parts and parts[0].startswith("(") and len(parts) >= 2:
            rows[parts[0]] = parts[1]
    want = {f"({n})": "true" for n in range(2, 10)}
    ok = proc.returncode == 0 and rows == want and "overall: true" in proc.stdout and dt <= 45 * 60
    report(3, ok, f"exit {proc.returncode}, sizes {sorted(rows, key=len)} all true={rows == want}, {dt:.0f}s")


def test_criterion_4_engine_agreement(report):
    t0 = time.perf_counter()
    n = mismatches = replay_failures = 0
    for seed in range(150):
        for kind in ("EF", "AG", "EU"):
            spec, sizes, f = corpus.case(seed, ops=(kind,))
            z = check_formula(spec, sizes, f)
            d = check_formula(spec, sizes, f, engine="discrete")
            n += 1
            mismatches += z.truth != d.truth
            if z.witness is not None and not replay(z.witness):
                replay_failures += 1
    dt = time.perf_counter() - t0
    ok = n >= 100 and mismatches == 0 and replay_failures == 0 and dt < 600
    report(4, ok, f"{n} formulas, {mismatches} mismatches, {replay_failures} bad witnesses, {dt:.1f}s")


def test_criterion_5_lemma_suites(report):
    t0 = time.perf_counter()
    lines = []
    total = 0
    for suite, trials in (("mono", 50), ("bound", 50), ("trunc", 30)):
        r = run_suite(suite, GenParams(seed=0), trials)
        total += len(r.violations)
        lines.append(f"{suite}: {r.summary}")
    dt = time.perf_counter() - t0
    report(5, total == 0 and dt < 20 * 60, "; ".join(lines) + f"; {dt:.0f}s")


def test_criterion_6_abstraction(report):
    proc = resolve_model("fischer_proc")
    full = resolve_model("fischer_full")
    reduced = resolve_model("fischer_reduced")
    P = proc.templates[0]
    n_product = len(product(P, VarBinding.from_template(P, "v")).template.states)
    pruned = abstract_spec(proc, "P", "v").templates[0]
    manual = set(pruned.states) - {"b2_diff"}
    four = manual == set(reduced.templates[0].states) and len(manual) == 4
    sims = {n: simulation_check(proc, full, n).holds for n in (2, 3)}
    tags_prop = parse_property(PROP2, reduced)
    sizes = [s for s in enumerate_sizes(compute_cutoff(reduced, tags_prop), tags_prop)]
    tags = all(tag_exclusion(reduced, tuple(s)).truth for s in sizes)
    ok = n_product == 8 and pruned == full.templates[0] and four and all(sims.values()) and tags
    report(6, ok, f"product {n_product}, pruned {len(pruned.states)}, reduced {len(manual)}, "
                  f"simulation {sims}, tag exclusion at sizes {[tuple(s) for s in sizes]}: {tags}")


def test_criterion_7_semantics_properties(report):
    t0 = time.perf_counter()
    cases = failures = 0
    for seed in range(300):
        for check_ in props.ALL:
            cases += 1
            try:
                check_(seed)
            except AssertionError:
                failures += 1
    dt = time.perf_counter() - t0
    report(7, cases >= 1000 and failures == 0 and dt < 120, f"{cases} cases, {failures} failures, {dt:.1f}s")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", *sys.argv[1:]]))
