import random
import re
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pnta.cli import resolve_model, shipped_models
from pnta.cutoff import parameterized_check
from pnta.lemmalab import GenParams, random_spec
from pnta.semantics import Network, random_run
from pnta.textio import (
    ModelWarning,
    ParseError,
    emit_report,
    emit_trace,
    parse_model,
    parse_model_document,
    parse_property,
    print_model,
    print_property,
)

GOLDEN = Path(__file__).parent / "golden"


@pytest.mark.parametrize("name", shipped_models())
def test_shipped_models_round_trip(name):
    spec = resolve_model(name)
    assert parse_model(print_model(spec)) == parse_model(print_model(parse_model(print_model(spec))))
    again = parse_model(print_model(spec))
    assert [t.name for t in again.templates] == [t.name for t in spec.templates]
    assert again.templates == spec.templates or print_model(again) == print_model(spec)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000))
def test_random_specs_round_trip(seed):
    spec = random_spec(GenParams(seed, max_clocks=2, max_constant=3))
    assert parse_model(print_model(spec)).templates == spec.templates


def test_no_templates():
    with pytest.raises(ParseError, match="no templates"):
        parse_model("const k = 1;\n")


def test_implicit_initial_in_allowed_set():
    text = """
template T {
  init a;
  state a;
  state b;
  trans a -> b { when T in {b}; }
}
"""
    with pytest.warns(ModelWarning, match="added implicitly"):
        doc = parse_model_document(text)
    (tr,) = doc.spec.templates[0].transitions
    assert dict(tr.cguard.allowed)["T"] == frozenset({"a", "b"})


def test_syntax_error_position():
    with pytest.raises(ParseError) as exc:
        parse_model("template T {\n  init a;\n  state a\n  trans a -> a { }\n}\n")
    assert exc.value.line == 4


def test_validation_diagnostics_point_at_template():
    with pytest.raises(ParseError, match="zz") as exc:
        parse_model("const k = 1;\ntemplate T {\n  init a;\n  state a;\n  trans a -> zz { }\n}\n")
    assert exc.value.line == 2


def test_finite_prefix_combinations(reduced):
    with pytest.raises(ParseError, match="not supported"):
        parse_property("forall i:P . Afin F[>=0] CS_mypid(i)", reduced)
    assert parse_property("forall i:P . Afin G[>=0] !CS_mypid(i)", reduced).quantifier == "Afin"


@pytest.mark.parametrize("text", [
    "forall i:P . E F[>=0] CS_mypid(i)",
    "forall i:P, j:P with i != j . A G[>=0] !(CS_mypid(i) & CS_mypid(j))",
    "forall i:P . A F[<=5] CS_mypid(i)",
    "forall i:P . E (!CS_mypid(i)) U[>=0] (CS_mypid(i))",
    "forall i:P . Einf G[==1/2] Init_diff(i) | b1_diff(i)",
])
def test_property_round_trip(reduced, text):
    p = parse_property(text, reduced)
    assert parse_property(print_property(p), reduced) == p


def test_unknown_state_in_property(reduced):
    with pytest.raises(ParseError, match="no state"):
        parse_property("forall i:P . E F[>=0] CS(i)", reduced)


def normalize_report(text):
    # timings and state counts vary between runs and engines versions
    text = re.sub(r"\d+\.\d\ds?", "<t>", text)
    text = re.sub(r"(\)\s+(?:true|false)\s+)\d+", r"\1<n>", text)
    return re.sub(r" +", " ", text)


def test_trace_golden(reduced):
    run = random_run(Network(reduced, (2,)), 15, random.Random(3))
    assert emit_trace(run) == (GOLDEN / "trace_reduced_2.txt").read_text()


def test_report_golden(reduced, prop):
    pv = parameterized_check(reduced, prop("forall i:P . A F[>=0] CS_mypid(i)"))
    assert normalize_report(emit_report(pv)) == (GOLDEN / "report_af.txt").read_text()
