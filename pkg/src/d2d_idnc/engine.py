"""One-slot transmission semantics: plan feasibility and per-user decoding."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

from ._bitset import bits, mask_of
from .errors import FeasibilityError
from .session import SessionState, is_complete
from .topology import ConnectionMatrix

# Rule tags reported by validate_plan.
ADMISSIBILITY_BS = "admissibility_bs"
ADMISSIBILITY_D2D = "admissibility_d2d"
NOT_HELD = "not_held"
EMPTY_CODE = "empty_code"
CONFLICT = "conflict"
CONGESTION = "congestion"
REDUNDANCY = "redundancy"
OUT_OF_RANGE = "out_of_range"


@dataclass(frozen=True)
class TransmissionPlan:
    """What is sent in one slot.

    ``bs_code`` is the set of packets XORed on the cellular link (empty
    means the BS is idle). ``d2d_codes`` maps each transmitting user to the
    packets it XORs on its D2D broadcast.
    """

    bs_code: frozenset[int] = frozenset()
    d2d_codes: Mapping[int, frozenset[int]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "bs_code", frozenset(self.bs_code))
        codes = {int(u): frozenset(c) for u, c in sorted(self.d2d_codes.items())}
        object.__setattr__(self, "d2d_codes", codes)

    @property
    def is_empty(self) -> bool:
        return not self.bs_code and not any(self.d2d_codes.values())

    @property
    def n_packets_sent(self) -> int:
        return len(self.bs_code) + sum(len(c) for c in self.d2d_codes.values())

    def describe(self) -> str:
        """1-based human-readable summary, e.g. ``BS: p2+p4; UE2: p1+p3``."""
        parts = []
        if self.bs_code:
            parts.append("BS: " + _code_label(self.bs_code))
        for u, code in self.d2d_codes.items():
            parts.append(f"UE{u + 1}: " + _code_label(code))
        return "; ".join(parts) if parts else "idle"

    @classmethod
    def parse(cls, text: str) -> "TransmissionPlan":
        """Inverse of :meth:`describe`."""
        text = text.strip()
        if text == "idle":
            return cls()
        bs: frozenset[int] = frozenset()
        d2d: dict[int, frozenset[int]] = {}
        for part in text.split(";"):
            who, _, code = part.partition(":")
            who = who.strip()
            try:
                packets = frozenset(int(tok.strip().removeprefix("p")) - 1 for tok in code.split("+"))
                if who == "BS":
                    bs = packets
                elif who.startswith("UE"):
                    d2d[int(who[2:]) - 1] = packets
                else:
                    raise ValueError(who)
            except ValueError:
                raise ValueError(f"cannot parse plan segment {part.strip()!r}") from None
        return cls(bs, d2d)

    def to_dict(self) -> dict:
        return {
            "bs_code": [p + 1 for p in sorted(self.bs_code)],
            "d2d_codes": {str(u + 1): [p + 1 for p in sorted(c)] for u, c in self.d2d_codes.items()},
        }


def _code_label(code) -> str:
    return "+".join(f"p{p + 1}" for p in sorted(code))


class Violation(NamedTuple):
    rule: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    @property
    def rules(self) -> frozenset[str]:
        return frozenset(v.rule for v in self.violations)


def validate_plan(plan: TransmissionPlan, state: SessionState, c: ConnectionMatrix) -> ValidationReport:
    """Check a plan against every feasibility rule and list all violations."""
    out: list[Violation] = []
    if c.n_users != state.n_users:
        raise ValueError(f"topology has {c.n_users} users, state has {state.n_users}")
    n, m = state.n_users, state.n_packets

    def in_range(code, who) -> bool:
        bad = [p for p in code if not 0 <= p < m]
        if bad:
            out.append(Violation(OUT_OF_RANGE, f"{who} sends unknown packets {bad}"))
        return not bad

    bs_mask = mask_of(plan.bs_code) if in_range(plan.bs_code, "BS") else 0
    for u, w in enumerate(state.wants):
        if (bs_mask & w).bit_count() > 1:
            out.append(Violation(ADMISSIBILITY_BS, f"UE{u + 1} wants {_code_label(bits(bs_mask & w))} from the BS code"))

    tx_masks: dict[int, int] = {}
    for i, code in plan.d2d_codes.items():
        if not 0 <= i < n:
            out.append(Violation(OUT_OF_RANGE, f"transmitter {i} does not exist"))
            continue
        if not code:
            out.append(Violation(EMPTY_CODE, f"UE{i + 1} has an empty code"))
            continue
        if not in_range(code, f"UE{i + 1}"):
            continue
        cm = mask_of(code)
        tx_masks[i] = cm
        if cm & ~state.has[i]:
            out.append(Violation(NOT_HELD, f"UE{i + 1} lacks {_code_label(bits(cm & ~state.has[i]))}"))
        for k in bits(c.neighbors[i]):
            if (cm & state.wants[k]).bit_count() > 1:
                out.append(Violation(ADMISSIBILITY_D2D, f"UE{k + 1} wants {_code_label(bits(cm & state.wants[k]))} from UE{i + 1}"))
        if cm & bs_mask:
            out.append(Violation(REDUNDANCY, f"{_code_label(bits(cm & bs_mask))} sent by both BS and UE{i + 1}"))

    txs = sorted(tx_masks)
    for a_idx, i in enumerate(txs):
        for j in txs[a_idx + 1:]:
            if c.neighbors[i] >> j & 1:
                out.append(Violation(CONFLICT, f"UE{i + 1} and UE{j + 1} are linked and both transmit"))
            shared = c.neighbors[i] & c.neighbors[j]
            if shared:
                who = ", ".join(f"UE{k + 1}" for k in bits(shared))
                out.append(Violation(CONGESTION, f"{who} would hear both UE{i + 1} and UE{j + 1}"))
    return ValidationReport(tuple(out))


class Recovery(NamedTuple):
    user: int
    packet: int
    transmitter: int | None  # None: cellular link

    @property
    def link(self) -> str:
        return "cellular" if self.transmitter is None else "d2d"

    def describe(self) -> str:
        via = "BS" if self.transmitter is None else f"UE{self.transmitter + 1}"
        return f"UE{self.user + 1} <- p{self.packet + 1} via {via}"


@dataclass(frozen=True)
class SlotOutcome:
    recoveries: tuple[Recovery, ...]
    new_state: SessionState


def apply_plan(state: SessionState, plan: TransmissionPlan, c: ConnectionMatrix) -> SlotOutcome:
    """Deliver one slot over lossless links.

    A receiver decodes a code iff exactly one of its packets is still
    wanted. Cellular and D2D run on separate bands, so a user can gain one
    packet from each in the same slot; transmitters do not listen on D2D.
    """
    report = validate_plan(plan, state, c)
    if not report.ok:
        raise FeasibilityError("plan is infeasible: " + "; ".join(v.detail for v in report.violations), report.violations)

    recoveries: list[Recovery] = []
    bs_mask = mask_of(plan.bs_code)
    tx_masks = {i: mask_of(code) for i, code in plan.d2d_codes.items()}
    transmitting = mask_of(tx_masks)
    for u, w in enumerate(state.wants):
        hit = bs_mask & w
        if hit and hit.bit_count() == 1:
            recoveries.append(Recovery(u, hit.bit_length() - 1, None))
        if transmitting >> u & 1:
            continue
        for i in bits(c.neighbors[u] & transmitting):
            hit = tx_masks[i] & w
            if hit and hit.bit_count() == 1:
                recoveries.append(Recovery(u, hit.bit_length() - 1, i))
    return SlotOutcome(tuple(recoveries), state.with_recoveries((r.user, r.packet) for r in recoveries))


@dataclass(frozen=True)
class SlotRecord:
    plan: TransmissionPlan
    outcome: SlotOutcome
    note: str = ""


@dataclass(frozen=True)
class ScheduleResult:
    """A finished recovery schedule.

    ``completion_time`` counts executed slots; ``initial_state`` is kept so
    traces can be replayed.
    """

    scheduler_id: str
    initial_state: SessionState
    slots: tuple[SlotRecord, ...]

    @property
    def completion_time(self) -> int:
        return len(self.slots)

    @property
    def final_state(self) -> SessionState:
        return self.slots[-1].outcome.new_state if self.slots else self.initial_state

    @property
    def complete(self) -> bool:
        return is_complete(self.final_state)

    def to_dict(self) -> dict:
        return {
            "scheduler": self.scheduler_id,
            "completion_time": self.completion_time,
            "slots": [
                {
                    "slot": t + 1,
                    **rec.plan.to_dict(),
                    "note": rec.note,
                    "recoveries": [
                        {
                            "user": r.user + 1,
                            "packet": r.packet + 1,
                            "source": "cellular" if r.transmitter is None else f"d2d:{r.transmitter + 1}",
                        }
                        for r in rec.outcome.recoveries
                    ],
                }
                for t, rec in enumerate(self.slots)
            ],
        }
