"""Packet reception state after the broadcast stage.

A :class:`SessionState` records, per user, which packets were received
(the Has set). Everything else of the content is in that user's Wants
set. The packet-by-user feedback matrix is a derived view.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np

from ._bitset import bits, mask_of
from .errors import InvalidSpecError

DEFAULT_ERASURE_PROBABILITY = 0.25


@dataclass(frozen=True)
class SessionState:
    n_users: int
    n_packets: int
    has: tuple[int, ...]

    def __post_init__(self):
        if self.n_users <= 0 or self.n_packets <= 0:
            raise InvalidSpecError("n_users and n_packets must be positive")
        if len(self.has) != self.n_users:
            raise InvalidSpecError("one Has mask per user is required")
        if any(h < 0 or h >> self.n_packets for h in self.has):
            raise InvalidSpecError("Has set references a packet out of range")

    # construction --------------------------------------------------------

    @classmethod
    def from_has_sets(cls, n_packets: int, has_sets: Iterable[Iterable[int]]) -> "SessionState":
        masks = tuple(mask_of(s) for s in has_sets)
        return cls(len(masks), n_packets, masks)

    @classmethod
    def from_feedback(cls, feedback) -> "SessionState":
        """Build from an ``n_packets x n_users`` 0/1 matrix (1 = received)."""
        f = np.asarray(feedback)
        if f.ndim != 2 or not np.isin(f, (0, 1)).all():
            raise InvalidSpecError("feedback must be a 2-D 0/1 matrix")
        m, n = f.shape
        return cls(n, m, tuple(mask_of(np.flatnonzero(f[:, u])) for u in range(n)))

    # views ---------------------------------------------------------------

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.n_packets) - 1

    @cached_property
    def wants(self) -> tuple[int, ...]:
        """Wants sets as packet bitmasks, one per user."""
        return tuple(self.full_mask & ~h for h in self.has)

    @cached_property
    def wanters(self) -> tuple[int, ...]:
        """For each packet, the bitmask of users missing it."""
        out = [0] * self.n_packets
        for u, w in enumerate(self.wants):
            for p in bits(w):
                out[p] |= 1 << u
        return tuple(out)

    @property
    def feedback(self) -> np.ndarray:
        f = np.zeros((self.n_packets, self.n_users), dtype=np.uint8)
        for u, h in enumerate(self.has):
            f[bits(h), u] = 1
        return f

    def has_set(self, user: int) -> frozenset[int]:
        return frozenset(bits(self.has[user]))

    def wants_set(self, user: int) -> frozenset[int]:
        return frozenset(bits(self.wants[user]))

    def total_wants(self) -> int:
        return sum(w.bit_count() for w in self.wants)

    def missing_anywhere(self) -> int:
        """Bitmask of packets wanted by at least one user."""
        m = 0
        for w in self.wants:
            m |= w
        return m

    # transitions ---------------------------------------------------------

    def with_recoveries(self, recoveries: Iterable[tuple[int, int]]) -> "SessionState":
        """New state where each ``(user, packet)`` pair has been received."""
        has = list(self.has)
        for user, packet in recoveries:
            has[user] |= 1 << packet
        return SessionState(self.n_users, self.n_packets, tuple(has))


@dataclass(frozen=True)
class ErasureSpec:
    erasure_probability: float = DEFAULT_ERASURE_PROBABILITY
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.erasure_probability <= 1.0:
            raise InvalidSpecError("erasure_probability must lie in [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise InvalidSpecError("seed must be a 64-bit unsigned integer")


def generate_feedback(n_users: int, n_packets: int, spec: ErasureSpec) -> SessionState:
    """Independent per-(packet, user) erasures of the broadcast stage."""
    if n_users <= 0 or n_packets <= 0:
        raise InvalidSpecError("n_users and n_packets must be positive")
    rng = np.random.default_rng(spec.seed)
    received = rng.random((n_packets, n_users)) >= spec.erasure_probability
    return SessionState.from_feedback(received.astype(np.uint8))


def s_bs(state: SessionState) -> frozenset[int]:
    """Packets missing at every user; only the BS can supply these."""
    common = state.full_mask
    for w in state.wants:
        common &= w
    return frozenset(bits(common))


def demand_count(state: SessionState, packet: int) -> int:
    if not 0 <= packet < state.n_packets:
        raise IndexError(f"packet {packet} out of range for {state.n_packets} packets")
    return state.wanters[packet].bit_count()


def is_complete(state: SessionState) -> bool:
    return not any(state.wants)


# -- text fixtures ---------------------------------------------------------


def dumps_session(state: SessionState) -> str:
    lines = [f"packets {state.n_packets}", f"users {state.n_users}"]
    for u, h in enumerate(state.has):
        lines.append(f"has {u + 1}: " + " ".join(str(p + 1) for p in bits(h)))
    return "\n".join(line.rstrip() for line in lines) + "\n"


def loads_session(text: str) -> SessionState:
    n_packets = n_users = None
    has: dict[int, list[int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("has"):
                label, _, rest = line[3:].partition(":")
                user = int(label) - 1
                if user in has:
                    raise ValueError
                has[user] = [int(tok) - 1 for tok in rest.split()]
            else:
                head, value = line.split()
                if head == "packets":
                    n_packets = int(value)
                elif head == "users":
                    n_users = int(value)
                else:
                    raise ValueError
        except ValueError:
            raise InvalidSpecError(f"line {lineno}: cannot parse {raw!r}") from None
    if n_packets is None or n_users is None:
        raise InvalidSpecError("session fixture needs 'packets' and 'users' headers")
    if any(not 0 <= u < n_users for u in has):
        raise InvalidSpecError("'has' line for a user out of range")
    for u, packets in has.items():
        if any(not 0 <= p < n_packets for p in packets):
            raise InvalidSpecError(f"user {u + 1} lists a packet out of range")
    return SessionState.from_has_sets(n_packets, [has.get(u, []) for u in range(n_users)])


def write_session(state: SessionState, path) -> None:
    Path(path).write_text(dumps_session(state))


def read_session(path) -> SessionState:
    return loads_session(Path(path).read_text())
