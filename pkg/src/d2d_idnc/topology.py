"""D2D connectivity: connection matrices, coverage areas and generators.

Users are 0-based everywhere in the library. The text fixture format and
all human-facing output use 1-based labels (``UE1``, ``UE2``, ...).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from ._bitset import bits as _bits, mask_of
from .errors import InvalidSpecError

DEFAULT_EDGE_PROBABILITY = 0.3


@dataclass(frozen=True)
class ConnectionMatrix:
    """Symmetric, zero-diagonal user adjacency.

    Stored as one neighbour bitmask per user; bit ``k`` of
    ``neighbors[j]`` is set when users ``j`` and ``k`` share a single-hop
    D2D link.
    """

    n_users: int
    neighbors: tuple[int, ...]

    def __post_init__(self):
        if self.n_users <= 0:
            raise InvalidSpecError("n_users must be positive")
        if len(self.neighbors) != self.n_users:
            raise InvalidSpecError("one neighbour mask per user is required")
        full = (1 << self.n_users) - 1
        for j, mask in enumerate(self.neighbors):
            if mask & ~full:
                raise InvalidSpecError(f"user {j} has a neighbour outside range")
            if mask >> j & 1:
                raise InvalidSpecError(f"user {j} is connected to itself")
            for k in _bits(mask):
                if not self.neighbors[k] >> j & 1:
                    raise InvalidSpecError(f"link {j}-{k} is not symmetric")

    @classmethod
    def from_array(cls, adjacency) -> "ConnectionMatrix":
        a = np.asarray(adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidSpecError(f"adjacency must be square, got shape {a.shape}")
        if not np.isin(a, (0, 1)).all():
            raise InvalidSpecError("adjacency entries must be 0 or 1")
        masks = tuple(
            mask_of(np.flatnonzero(row)) for row in a.astype(bool)
        )
        return cls(a.shape[0], masks)

    @classmethod
    def from_edges(cls, n_users: int, edges: Iterable[tuple[int, int]]) -> "ConnectionMatrix":
        """Build from 0-based undirected edges."""
        if n_users <= 0:
            raise InvalidSpecError("n_users must be positive")
        masks = [0] * n_users
        for j, k in edges:
            if not (0 <= j < n_users and 0 <= k < n_users):
                raise InvalidSpecError(f"edge ({j}, {k}) out of range")
            if j == k:
                raise InvalidSpecError(f"self-loop on user {j}")
            masks[j] |= 1 << k
            masks[k] |= 1 << j
        return cls(n_users, tuple(masks))

    @classmethod
    def fully_connected(cls, n_users: int) -> "ConnectionMatrix":
        if n_users <= 0:
            raise InvalidSpecError("n_users must be positive")
        full = (1 << n_users) - 1
        return cls(n_users, tuple(full & ~(1 << j) for j in range(n_users)))

    @property
    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n_users, self.n_users), dtype=bool)
        for j, mask in enumerate(self.neighbors):
            a[j, _bits(mask)] = True
        return a

    def connected(self, j: int, k: int) -> bool:
        return bool(self.neighbors[j] >> k & 1)

    def edges(self) -> list[tuple[int, int]]:
        """Undirected edges as sorted 0-based pairs ``(j, k)`` with ``j < k``."""
        return [(j, k) for j in range(self.n_users) for k in _bits(self.neighbors[j]) if j < k]


@dataclass(frozen=True)
class TopologySpec:
    """Recipe for :func:`generate`.

    ``kind`` is ``"fully_connected"`` or ``"random_uniform"``; the latter
    draws every unordered user pair independently with ``edge_probability``.
    """

    n_users: int
    kind: str = "random_uniform"
    edge_probability: float = DEFAULT_EDGE_PROBABILITY
    seed: int = 0

    def __post_init__(self):
        if self.n_users <= 0:
            raise InvalidSpecError("n_users must be positive")
        if self.kind not in ("fully_connected", "random_uniform"):
            raise InvalidSpecError(f"unknown topology kind {self.kind!r}")
        if not 0.0 <= self.edge_probability <= 1.0:
            raise InvalidSpecError("edge_probability must lie in [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise InvalidSpecError("seed must be a 64-bit unsigned integer")


def generate(spec: TopologySpec) -> ConnectionMatrix:
    """Draw a connection matrix; a pure function of ``spec``."""
    n = spec.n_users
    if spec.kind == "fully_connected":
        return ConnectionMatrix.fully_connected(n)
    rng = np.random.default_rng(spec.seed)
    draws = rng.random((n, n)) < spec.edge_probability
    upper = np.triu(draws, k=1)
    return ConnectionMatrix.from_array(upper | upper.T)


def coverage_area(c: ConnectionMatrix, user: int) -> frozenset[int]:
    """Users directly reachable from ``user`` over one D2D hop."""
    if not 0 <= user < c.n_users:
        raise IndexError(f"user {user} out of range for {c.n_users} users")
    return frozenset(_bits(c.neighbors[user]))


def singleton_users(c: ConnectionMatrix) -> frozenset[int]:
    return frozenset(j for j, mask in enumerate(c.neighbors) if mask == 0)


# -- text fixtures ---------------------------------------------------------


def dumps_topology(c: ConnectionMatrix) -> str:
    lines = [f"users {c.n_users}"]
    lines += [f"edge {j + 1} {k + 1}" for j, k in c.edges()]
    return "\n".join(lines) + "\n"


def loads_topology(text: str) -> ConnectionMatrix:
    n_users = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "users" and len(rest) == 1:
                n_users = int(rest[0])
            elif head == "edge" and len(rest) == 2:
                edges.append((int(rest[0]) - 1, int(rest[1]) - 1))
            else:
                raise ValueError
        except ValueError:
            raise InvalidSpecError(f"line {lineno}: cannot parse {raw!r}") from None
    if n_users is None:
        raise InvalidSpecError("missing 'users <N>' header")
    return ConnectionMatrix.from_edges(n_users, edges)


def write_topology(c: ConnectionMatrix, path) -> None:
    Path(path).write_text(dumps_topology(c))


def read_topology(path) -> ConnectionMatrix:
    return loads_topology(Path(path).read_text())
