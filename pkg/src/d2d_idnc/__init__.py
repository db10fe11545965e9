"""Packet recovery scheduling over joint cellular and D2D links with IDNC."""

from .conflict_graph import (
    ConflictGraph,
    Vertex,
    build_higher_layer,
    build_lower_layer,
    build_two_layer,
    decode_independent_set,
)
from .engine import ScheduleResult, SlotOutcome, TransmissionPlan, apply_plan, validate_plan
from .errors import CapacityError, FeasibilityError, InvalidSpecError
from .mis import brute_force_mis, is_independent, maximum_independent_set
from .schedulers import SCHEDULER_IDS, run_scheduler
from .session import ErasureSpec, SessionState, demand_count, generate_feedback, is_complete, s_bs
from .topology import ConnectionMatrix, TopologySpec, coverage_area, generate, singleton_users

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ConflictGraph",
    "ConnectionMatrix",
    "ErasureSpec",
    "FeasibilityError",
    "InvalidSpecError",
    "SCHEDULER_IDS",
    "ScheduleResult",
    "SessionState",
    "SlotOutcome",
    "TopologySpec",
    "TransmissionPlan",
    "Vertex",
    "apply_plan",
    "brute_force_mis",
    "build_higher_layer",
    "build_lower_layer",
    "build_two_layer",
    "coverage_area",
    "decode_independent_set",
    "demand_count",
    "generate",
    "generate_feedback",
    "is_complete",
    "is_independent",
    "maximum_independent_set",
    "run_scheduler",
    "s_bs",
    "singleton_users",
    "validate_plan",
]
