"""Reference schedulers without D2D help."""

from __future__ import annotations

from ._bitset import lowest
from .conflict_graph import build_higher_layer, decode_independent_set
from .engine import ScheduleResult, SlotRecord, TransmissionPlan, apply_plan
from .mis import DEFAULT_MAX_VERTICES, maximum_independent_set
from .session import SessionState, is_complete
from .topology import ConnectionMatrix

UNCODED_BS = "uncoded-bs"
CELLULAR_ONLY_IDNC = "cellular-only-idnc"


def run_uncoded_bs(state: SessionState, c: ConnectionMatrix) -> ScheduleResult:
    """The BS resends one missing packet per slot, lowest index first."""
    slots = []
    current = state
    while not is_complete(current):
        plan = TransmissionPlan(frozenset([lowest(current.missing_anywhere())]))
        outcome = apply_plan(current, plan, c)
        slots.append(SlotRecord(plan, outcome))
        current = outcome.new_state
    return ScheduleResult(UNCODED_BS, state, tuple(slots))


def run_cellular_only_idnc(
    state: SessionState, c: ConnectionMatrix, max_vertices: int = DEFAULT_MAX_VERTICES
) -> ScheduleResult:
    """Largest instantly decodable BS code each slot; D2D unused."""
    slots = []
    current = state
    while not is_complete(current):
        graph = build_higher_layer(current)
        chosen = maximum_independent_set(graph, max_vertices)
        plan = decode_independent_set(graph, chosen)
        outcome = apply_plan(current, plan, c)
        slots.append(SlotRecord(plan, outcome, note=f"mis={len(chosen)}/{len(graph)}"))
        current = outcome.new_state
    return ScheduleResult(CELLULAR_ONLY_IDNC, state, tuple(slots))
