"""Parameterized timed model checking for networks with conjunctive guards."""

__version__ = "0.1.0"

from .checker import Verdict, check, expand_indices
from .cutoff import CutoffVector, ParamVerdict, compute_cutoff, enumerate_sizes, parameterized_check
from .logic import Bound, Property
from .model import NetworkSpec, SizeVector, Template, Transition
from .semantics import Network, Run, replay
from .textio import emit_report, emit_trace, load_model, parse_model, parse_property, print_model

__all__ = [
    "Bound",
    "CutoffVector",
    "Network",
    "NetworkSpec",
    "ParamVerdict",
    "Property",
    "Run",
    "SizeVector",
    "Template",
    "Transition",
    "Verdict",
    "check",
    "compute_cutoff",
    "emit_report",
    "emit_trace",
    "enumerate_sizes",
    "expand_indices",
    "load_model",
    "parameterized_check",
    "parse_model",
    "parse_property",
    "print_model",
    "replay",
]
