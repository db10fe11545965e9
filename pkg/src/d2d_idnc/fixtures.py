"""The two worked instances used throughout the tests and docs.

``example_1``: three users, four packets, fully connected D2D.
``example_2``: four users, three packets; UE1 and UE3 hang off UE2 and
UE4 is isolated.
"""

from __future__ import annotations

from .session import SessionState
from .topology import ConnectionMatrix


def example_1() -> tuple[SessionState, ConnectionMatrix]:
    state = SessionState.from_has_sets(4, [{0, 3}, {0, 1, 2}, {1, 2}])
    return state, ConnectionMatrix.fully_connected(3)


def example_2() -> tuple[SessionState, ConnectionMatrix]:
    state = SessionState.from_has_sets(3, [{1}, {0, 2}, {1}, {1, 2}])
    return state, ConnectionMatrix.from_edges(4, [(0, 1), (1, 2)])
