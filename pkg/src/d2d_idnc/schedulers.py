"""Name -> scheduler lookup shared by the harness and the CLI."""

from __future__ import annotations

from . import baselines, netcam_wp, opt_idnc
from .engine import ScheduleResult
from .mis import DEFAULT_MAX_VERTICES
from .session import SessionState
from .topology import ConnectionMatrix

SCHEDULER_IDS = (
    opt_idnc.SCHEDULER_ID,
    netcam_wp.SCHEDULER_ID,
    baselines.UNCODED_BS,
    baselines.CELLULAR_ONLY_IDNC,
)


def run_scheduler(
    name: str, state: SessionState, c: ConnectionMatrix, max_vertices: int = DEFAULT_MAX_VERTICES
) -> ScheduleResult:
    if name == opt_idnc.SCHEDULER_ID:
        return opt_idnc.run(state, c, max_vertices)
    if name == netcam_wp.SCHEDULER_ID:
        return netcam_wp.run(state, c)
    if name == baselines.UNCODED_BS:
        return baselines.run_uncoded_bs(state, c)
    if name == baselines.CELLULAR_ONLY_IDNC:
        return baselines.run_cellular_only_idnc(state, c, max_vertices)
    raise KeyError(f"unknown scheduler {name!r}; choose from {', '.join(SCHEDULER_IDS)}")
