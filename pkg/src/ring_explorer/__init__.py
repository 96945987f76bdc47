"""Simulation and exhaustive verification of robot exploration protocols on anonymous rings."""
from .checker import (
    CheckReport,
    PhaseBudget,
    Verdict,
    enumerate_initials,
    find_counterexample,
    measure_bounds,
    scripted_impossibility_witnesses,
    verify,
)
from .exceptions import (
    BoundExceeded,
    ConfigFormatError,
    ProtocolAmbiguity,
    ProtocolPreconditionViolation,
    RingExplorerError,
    SchedulerError,
)
from .protocol import IDLE, Decision, Protocol
from .registry import get_protocol
from .ring_core import Direction, RingConfig, canonical_form, classify, view_at
from .scheduler import Semantics, Strategy, Trace, run

__version__ = "0.1.0"

__all__ = [
    "CheckReport",
    "PhaseBudget",
    "Verdict",
    "enumerate_initials",
    "find_counterexample",
    "measure_bounds",
    "scripted_impossibility_witnesses",
    "verify",
    "BoundExceeded",
    "ConfigFormatError",
    "ProtocolAmbiguity",
    "ProtocolPreconditionViolation",
    "RingExplorerError",
    "SchedulerError",
    "IDLE",
    "Decision",
    "Protocol",
    "get_protocol",
    "Direction",
    "RingConfig",
    "canonical_form",
    "classify",
    "view_at",
    "Semantics",
    "Strategy",
    "Trace",
    "run",
]
