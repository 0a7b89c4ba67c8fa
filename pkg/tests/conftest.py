from __future__ import annotations

import pytest

from pnta.cli import resolve_model
from pnta.textio import parse_property

PROP1 = "forall i:P . E F[>=0] CS_mypid(i)"
PROP2 = "forall i:P, j:P with i != j . A G[>=0] !(CS_mypid(i) & CS_mypid(j))"
PROP3 = "forall i:P . A F[>=0] CS_mypid(i)"


@pytest.fixture(scope="session")
def reduced():
    return resolve_model("fischer_reduced")


@pytest.fixture(scope="session")
def full():
    return resolve_model("fischer_full")


@pytest.fixture(scope="session")
def proc():
    return resolve_model("fischer_proc")


@pytest.fixture
def prop(reduced):
    return lambda text: parse_property(text, reduced)
