"""Per-slot optimal scheduling: maximum independent set of the two-layer graph."""

from __future__ import annotations

from .conflict_graph import build_two_layer, decode_independent_set
from .engine import ScheduleResult, SlotRecord, apply_plan
from .errors import CapacityError
from .mis import DEFAULT_MAX_VERTICES, maximum_independent_set
from .session import SessionState, is_complete
from .topology import ConnectionMatrix

SCHEDULER_ID = "opt-idnc"


def run(state: SessionState, c: ConnectionMatrix, max_vertices: int = DEFAULT_MAX_VERTICES) -> ScheduleResult:
    """Send the largest feasible joint code every slot until nobody wants anything.

    Optimal slot by slot; the whole schedule is greedy over slots.
    """
    slots = []
    current = state
    while not is_complete(current):
        graph = build_two_layer(current, c)
        try:
            chosen = maximum_independent_set(graph, max_vertices)
        except CapacityError as exc:
            raise CapacityError(
                f"{exc} (N={state.n_users}, M={state.n_packets}, slot {len(slots) + 1})",
                exc.n_vertices,
                exc.limit,
            ) from exc
        plan = decode_independent_set(graph, chosen)
        outcome = apply_plan(current, plan, c)
        slots.append(SlotRecord(plan, outcome, note=f"mis={len(chosen)}/{len(graph)}"))
        current = outcome.new_state
    return ScheduleResult(SCHEDULER_ID, state, tuple(slots))
