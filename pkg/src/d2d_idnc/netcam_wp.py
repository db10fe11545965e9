"""NetCAM-WP: a polynomial-time heuristic built around the most wanted packet.

Each slot the BS side runs one of three phases:

``drain_s_bs``
    some packet is missing at every user; the BS sends one such packet
    uncoded (any XOR with it would be undecodable for someone).
``serve_singletons``
    users without D2D neighbours still miss packets; the BS seeds its code
    with one of them and grows it greedily.
``most_wanted``
    the BS seeds its code with the packet most users miss and grows it.

On the D2D side the most wanted packet not already on the cellular code
picks a transmitter, which sends a greedily grown code to its coverage
area; further users join when they neither hear nor share a listener with
an already selected transmitter.

All ties are broken deterministically: higher demand, then more
receivers where that applies, then the lower index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from ._bitset import bits, lowest, mask_of
from .engine import ScheduleResult, SlotRecord, TransmissionPlan, apply_plan
from .session import SessionState, is_complete, s_bs
from .topology import ConnectionMatrix, singleton_users

SCHEDULER_ID = "netcam-wp"

DRAIN_S_BS = "drain_s_bs"
SERVE_SINGLETONS = "serve_singletons"
MOST_WANTED = "most_wanted"


@dataclass
class OpCounter:
    """Counts elementary decodability checks, to keep per-slot work honest."""

    checks: int = 0


@dataclass(frozen=True)
class HeuristicSlotDecision:
    phase: str
    plan: TransmissionPlan
    excluded_packets: frozenset[int] = field(default_factory=frozenset)


def _demand(state: SessionState, packet: int, receivers: int) -> int:
    return (state.wanters[packet] & receivers).bit_count()


def _grow_code(
    state: SessionState,
    seed: int,
    candidates: Iterable[int],
    receivers: int,
    counter: OpCounter | None,
) -> int:
    """Add candidates to ``{seed}`` while every receiver still sees at most one wanted packet.

    Candidates are scanned by descending demand among ``receivers`` (lower
    index first on ties); packets no receiver wants are skipped.
    """
    ranked = sorted(
        (p for p in candidates if p != seed and _demand(state, p, receivers)),
        key=lambda p: (-_demand(state, p, receivers), p),
    )
    wants = [state.wants[u] for u in bits(receivers)]
    code = 1 << seed
    for p in ranked:
        trial = code | 1 << p
        if counter is not None:
            counter.checks += len(wants)
        if all((trial & w).bit_count() <= 1 for w in wants):
            code = trial
    return code


def _receivers(state: SessionState, code: int, receivers: int) -> int:
    """How many of ``receivers`` decode a new packet from ``code``."""
    return sum(1 for u in bits(receivers) if (code & state.wants[u]).bit_count() == 1)


def most_wanted(state: SessionState, exclude: Iterable[int] = ()) -> int | None:
    """Packet outside ``exclude`` missing at the most users; ``None`` if none is missing."""
    ex = mask_of(exclude)
    best, best_demand = None, 0
    for p in range(state.n_packets):
        if ex >> p & 1:
            continue
        d = state.wanters[p].bit_count()
        if d > best_demand:
            best, best_demand = p, d
    return best


def build_d2d_code(
    state: SessionState,
    c: ConnectionMatrix,
    transmitter: int,
    seed_packet: int,
    exclude: Iterable[int] = (),
    counter: OpCounter | None = None,
) -> frozenset[int]:
    ex = mask_of(exclude)
    if not state.has[transmitter] >> seed_packet & 1:
        raise ValueError(f"UE{transmitter + 1} does not hold p{seed_packet + 1}")
    if ex >> seed_packet & 1:
        raise ValueError(f"seed packet p{seed_packet + 1} is excluded")
    pool = bits(state.has[transmitter] & ~ex)
    return frozenset(bits(_grow_code(state, seed_packet, pool, c.neighbors[transmitter], counter)))


def select_transmitter(
    state: SessionState,
    c: ConnectionMatrix,
    packet: int,
    exclude: Iterable[int] = (),
    counter: OpCounter | None = None,
) -> int | None:
    """User holding ``packet`` with the most neighbours missing it.

    Ties go to the user whose greedy code reaches more receivers, then to
    the lower index.
    """
    holders = [
        (i, _demand(state, packet, c.neighbors[i]))
        for i in range(state.n_users)
        if state.has[i] >> packet & 1
    ]
    holders = [(i, d) for i, d in holders if d > 0]
    if not holders:
        return None
    top = max(d for _, d in holders)
    tied = [i for i, d in holders if d == top]
    if len(tied) == 1:
        return tied[0]
    exclude = tuple(exclude)

    def reach(i: int) -> int:
        code = mask_of(build_d2d_code(state, c, i, packet, exclude, counter))
        return _receivers(state, code, c.neighbors[i])

    return max(tied, key=lambda i: (reach(i), -i))


def schedule_concurrent(
    state: SessionState,
    c: ConnectionMatrix,
    first: tuple[int, frozenset[int]],
    exclude: Iterable[int] = (),
    counter: OpCounter | None = None,
) -> dict[int, frozenset[int]]:
    """Add D2D transmitters that can share the slot with ``first``.

    A user joins when it is not linked to, and shares no neighbour with,
    any transmitter already chosen, and it has something its neighbours
    want. Users are scanned by their best single-packet local demand.
    """
    ex = mask_of(exclude)
    tx, code = first
    chosen = {tx: frozenset(code)}

    def best_packet(j: int) -> tuple[int, int]:
        nbr = c.neighbors[j]
        options = [(_demand(state, p, nbr), p) for p in bits(state.has[j] & ~ex)]
        options = [(d, p) for d, p in options if d > 0]
        if not options:
            return 0, -1
        d, p = max(options, key=lambda dp: (dp[0], -dp[1]))
        return d, p

    ranked = []
    for j in range(state.n_users):
        if j == tx:
            continue
        d, p = best_packet(j)
        if d > 0:
            ranked.append((-d, j, p))
    ranked.sort()

    busy = 1 << tx  # transmitters so far
    heard = c.neighbors[tx]  # users listening to a chosen transmitter
    for _, j, p in ranked:
        nbr = c.neighbors[j]
        if nbr & busy or nbr & heard:
            continue
        chosen[j] = build_d2d_code(state, c, j, p, exclude, counter)
        busy |= 1 << j
        heard |= nbr
    return chosen


def _bs_code(state: SessionState, seed: int, counter: OpCounter | None) -> int:
    everyone = (1 << state.n_users) - 1
    return _grow_code(state, seed, range(state.n_packets), everyone, counter)


def decide(state: SessionState, c: ConnectionMatrix, counter: OpCounter | None = None) -> HeuristicSlotDecision:
    """Choose the plan for one slot of a state that is not yet complete."""
    everyone = (1 << state.n_users) - 1
    common = s_bs(state)
    lonely = 0
    for u in singleton_users(c):
        lonely |= state.wants[u]

    if common:
        phase = DRAIN_S_BS
        bs = 1 << min(common)
    elif lonely:
        phase = SERVE_SINGLETONS
        bs = _bs_code(state, lowest(lonely), counter)
    else:
        phase = MOST_WANTED
        top = max(w.bit_count() for w in state.wanters)
        seeds = [p for p in range(state.n_packets) if state.wanters[p].bit_count() == top]
        codes = [(_bs_code(state, p, counter), p) for p in seeds]
        bs, _ = max(codes, key=lambda cp: (cp[0].bit_count(), _receivers(state, cp[0], everyone), -cp[1]))

    excluded = frozenset(bits(bs))
    d2d: dict[int, frozenset[int]] = {}
    skip = set(excluded)
    while True:
        packet = most_wanted(state, skip)
        if packet is None:
            break
        tx = select_transmitter(state, c, packet, excluded, counter)
        if tx is None:
            # nobody can relay this packet over D2D; try the next one
            skip.add(packet)
            continue
        code = build_d2d_code(state, c, tx, packet, excluded, counter)
        d2d = schedule_concurrent(state, c, (tx, code), excluded, counter)
        break

    return HeuristicSlotDecision(phase, TransmissionPlan(excluded, d2d), excluded)


def run(state: SessionState, c: ConnectionMatrix, counter: OpCounter | None = None) -> ScheduleResult:
    slots = []
    current = state
    while not is_complete(current):
        decision = decide(current, c, counter)
        outcome = apply_plan(current, decision.plan, c)
        slots.append(SlotRecord(decision.plan, outcome, note=decision.phase))
        current = outcome.new_state
    return ScheduleResult(SCHEDULER_ID, state, tuple(slots))


def completion_bounds(state: SessionState, c: ConnectionMatrix) -> tuple[int, int]:
    """Lower and upper slot-count bounds for the heuristic on this instance.

    Lower: packets missing everywhere each need their own BS slot. Upper:
    BS-only packets (missing everywhere or at a singleton) plus half of
    what the neediest user still lacks beyond them, rounded up.
    """
    common = mask_of(s_bs(state))
    bs_only = common
    for u in singleton_users(c):
        bs_only |= state.wants[u]
    neediest = max(range(state.n_users), key=lambda u: (state.wants[u].bit_count(), -u))
    rest = state.wants[neediest] & ~bs_only
    return common.bit_count(), bs_only.bit_count() + math.ceil(rest.bit_count() / 2)
