"""Zone algebra and the symbolic zone-graph engine."""

from .dbm import (
    DBM,
    DiagonalUnsupported,
    dbm_canonicalize,
    dbm_extrapolate,
    dbm_from_constraint,
    dbm_intersect,
    dbm_reset,
    dbm_up,
)
from .engine import ZoneEngine, active_clocks, zone_successors

__all__ = [
    "DBM",
    "DiagonalUnsupported",
    "ZoneEngine",
    "active_clocks",
    "dbm_canonicalize",
    "dbm_extrapolate",
    "dbm_from_constraint",
    "dbm_intersect",
    "dbm_reset",
    "dbm_up",
    "zone_successors",
]
