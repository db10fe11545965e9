"""Two-layer IDNC conflict graphs.

The BS layer has one vertex per packet still missing somewhere; two BS
vertices conflict when some user wants both packets. The user layer has a
vertex ``(i, l)`` whenever user ``i`` holds packet ``l`` and a neighbour
of ``i`` wants it. User-layer vertices conflict when

* ``C1``: same transmitter, and some neighbour wants both packets;
* ``C2``: different transmitters sharing a neighbour (congestion);
* ``C3``: different transmitters that are themselves linked (conflict).

The combined graph adds a ``redundancy`` edge between the BS vertex and
every user-layer vertex carrying the same packet. Independent sets of the
combined graph are exactly the feasible joint transmission plans.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple

from ._bitset import bits, mask_of
from .engine import TransmissionPlan
from .errors import FeasibilityError
from .session import SessionState
from .topology import ConnectionMatrix

INADMISSIBLE_BS = "inadmissible_bs"
C1 = "C1"
C2 = "C2"
C3 = "C3"
REDUNDANCY = "redundancy"


class Vertex(NamedTuple):
    transmitter: int | None  # None: the base station
    packet: int

    @property
    def is_bs(self) -> bool:
        return self.transmitter is None

    def label(self) -> str:
        who = "BS" if self.transmitter is None else f"u{self.transmitter + 1}"
        return f"{who}:p{self.packet + 1}"


@dataclass(frozen=True, eq=False)
class ConflictGraph:
    """Undirected graph over coded-packet candidates.

    ``adj[v]`` is the neighbour bitmask of vertex index ``v``. The state
    and topology the graph was built from are kept so edge reasons can be
    recovered on demand.
    """

    vertices: tuple[Vertex, ...]
    adj: tuple[int, ...]
    state: SessionState = field(repr=False)
    topology: ConnectionMatrix | None = field(repr=False, default=None)

    def __len__(self) -> int:
        return len(self.vertices)

    @cached_property
    def index(self) -> dict[Vertex, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @property
    def n_edges(self) -> int:
        return sum(a.bit_count() for a in self.adj) // 2

    def has_edge(self, a: Vertex, b: Vertex) -> bool:
        ia, ib = self.index[a], self.index[b]
        return bool(self.adj[ia] >> ib & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, a in enumerate(self.adj) for v in bits(a >> (u + 1) << (u + 1))]

    def edge_set(self) -> set[frozenset[Vertex]]:
        return {frozenset((self.vertices[u], self.vertices[v])) for u, v in self.edges()}

    @cached_property
    def edge_reason(self) -> dict[tuple[int, int], frozenset[str]]:
        """Reason tags per edge ``(u, v)``, ``u < v``."""
        return {(u, v): _reasons(self.vertices[u], self.vertices[v], self.state, self.topology) for u, v in self.edges()}

    def layer_mask(self, bs: bool) -> int:
        return mask_of(i for i, v in enumerate(self.vertices) if v.is_bs == bs)

    def to_dot(self, name: str = "idnc") -> str:
        lines = [f"graph {name} {{"]
        for v in self.vertices:
            shape = "box" if v.is_bs else "ellipse"
            lines.append(f'  "{v.label()}" [shape={shape}];')
        for (u, v), why in self.edge_reason.items():
            tags = ",".join(sorted(why))
            lines.append(f'  "{self.vertices[u].label()}" -- "{self.vertices[v].label()}" [label="{tags}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _reasons(a: Vertex, b: Vertex, state: SessionState, c: ConnectionMatrix | None) -> frozenset[str]:
    if a.is_bs and b.is_bs:
        return frozenset([INADMISSIBLE_BS]) if state.wanters[a.packet] & state.wanters[b.packet] else frozenset()
    if a.is_bs or b.is_bs:
        return frozenset([REDUNDANCY]) if a.packet == b.packet else frozenset()
    tags = set()
    i, j = a.transmitter, b.transmitter
    if i == j:
        if state.wanters[a.packet] & state.wanters[b.packet] & c.neighbors[i]:
            tags.add(C1)
    else:
        if c.neighbors[i] & c.neighbors[j]:
            tags.add(C2)
        if c.neighbors[i] >> j & 1:
            tags.add(C3)
    return frozenset(tags)


def _check_dims(state: SessionState, c: ConnectionMatrix) -> None:
    if c.n_users != state.n_users:
        raise ValueError(f"topology has {c.n_users} users but state has {state.n_users}")


def _build(state: SessionState, c: ConnectionMatrix | None, higher: bool, lower: bool) -> ConflictGraph:
    wanters = state.wanters
    vertices: list[Vertex] = []
    if higher:
        vertices += [Vertex(None, p) for p in range(state.n_packets) if wanters[p]]
    n_bs = len(vertices)
    if lower:
        for i in range(state.n_users):
            nbr = c.neighbors[i]
            vertices += [Vertex(i, p) for p in bits(state.has[i]) if wanters[p] & nbr]

    adj = [0] * len(vertices)
    bs_of_packet: dict[int, int] = {}
    for a in range(n_bs):
        pa = vertices[a].packet
        bs_of_packet[pa] = a
        for b in range(a + 1, n_bs):
            if wanters[pa] & wanters[vertices[b].packet]:
                adj[a] |= 1 << b
                adj[b] |= 1 << a

    if lower:
        groups: dict[int, list[int]] = {}
        for idx in range(n_bs, len(vertices)):
            groups.setdefault(vertices[idx].transmitter, []).append(idx)
        group_mask = {i: mask_of(idxs) for i, idxs in groups.items()}
        for i, idxs in groups.items():
            nbr = c.neighbors[i]
            # C2 / C3 hit every vertex of an incompatible transmitter.
            cross = 0
            for j, gm in group_mask.items():
                if j != i and (c.neighbors[j] & nbr or nbr >> j & 1):
                    cross |= gm
            for a_pos, a in enumerate(idxs):
                pa = vertices[a].packet
                row = cross
                for b in idxs[a_pos + 1:]:
                    if wanters[pa] & wanters[vertices[b].packet] & nbr:
                        row |= 1 << b
                        adj[b] |= 1 << a
                if higher and pa in bs_of_packet:
                    s = bs_of_packet[pa]
                    row |= 1 << s
                    adj[s] |= 1 << a
                adj[a] |= row
    return ConflictGraph(tuple(vertices), tuple(adj), state, c)


def build_higher_layer(state: SessionState) -> ConflictGraph:
    return _build(state, None, higher=True, lower=False)


def build_lower_layer(state: SessionState, c: ConnectionMatrix) -> ConflictGraph:
    _check_dims(state, c)
    return _build(state, c, higher=False, lower=True)


def build_two_layer(state: SessionState, c: ConnectionMatrix) -> ConflictGraph:
    _check_dims(state, c)
    return _build(state, c, higher=True, lower=True)


# -- vertex sets <-> plans ---------------------------------------------------


def as_mask(vertices) -> int:
    """Accept a bitmask or an iterable of vertex indices."""
    return vertices if isinstance(vertices, int) else mask_of(vertices)


def conflicting_pairs(graph: ConflictGraph, vertices) -> list[tuple[int, int]]:
    m = as_mask(vertices)
    return [(u, v) for u in bits(m) for v in bits(graph.adj[u] & m) if u < v]


def plan_from_vertices(graph: ConflictGraph, vertices) -> TransmissionPlan:
    """Read a vertex set as a plan without checking independence."""
    bs: set[int] = set()
    d2d: dict[int, set[int]] = {}
    for idx in bits(as_mask(vertices)):
        v = graph.vertices[idx]
        if v.is_bs:
            bs.add(v.packet)
        else:
            d2d.setdefault(v.transmitter, set()).add(v.packet)
    return TransmissionPlan(frozenset(bs), {u: frozenset(s) for u, s in d2d.items()})


def decode_independent_set(graph: ConflictGraph, vertices) -> TransmissionPlan:
    """Map an independent vertex set to the joint plan it encodes."""
    bad = conflicting_pairs(graph, vertices)
    if bad:
        u, v = bad[0]
        a, b = graph.vertices[u], graph.vertices[v]
        why = ",".join(sorted(graph.edge_reason[(u, v)]))
        raise FeasibilityError(f"vertices {a.label()} and {b.label()} are adjacent ({why})", bad)
    return plan_from_vertices(graph, vertices)


def vertices_of_plan(graph: ConflictGraph, plan: TransmissionPlan) -> int:
    """Bitmask of the vertices encoding ``plan``.

    Raises ``KeyError`` when the plan sends something no vertex stands for
    (a packet nobody in reach wants).
    """
    m = 0
    for p in plan.bs_code:
        m |= 1 << graph.index[Vertex(None, p)]
    for u, code in plan.d2d_codes.items():
        for p in code:
            m |= 1 << graph.index[Vertex(u, p)]
    return m


def vertex_set(graph: ConflictGraph, labelled: Iterable[Vertex]) -> int:
    return mask_of(graph.index[v] for v in labelled)
