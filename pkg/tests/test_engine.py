import numpy as np
import pytest

from d2d_idnc import conflict_graph as cg
from d2d_idnc import engine as en
from d2d_idnc.engine import Recovery, TransmissionPlan, apply_plan, validate_plan
from d2d_idnc.errors import FeasibilityError
from d2d_idnc.session import SessionState, is_complete
from d2d_idnc.topology import ConnectionMatrix

from _instances import random_instance

NARRATIVE = TransmissionPlan({1, 3}, {1: {0, 2}})


def test_single_slot_plan_of_first_example(ex1):
    state, c = ex1
    assert validate_plan(NARRATIVE, state, c).ok
    out = apply_plan(state, NARRATIVE, c)
    assert set(out.recoveries) == {
        Recovery(0, 1, None),
        Recovery(0, 2, 1),
        Recovery(1, 3, None),
        Recovery(2, 3, None),
        Recovery(2, 0, 1),
    }
    assert is_complete(out.new_state)


def test_bs_inadmissible_code(ex1):
    report = validate_plan(TransmissionPlan({1, 2}), *ex1)
    assert report.rules == {en.ADMISSIBILITY_BS}
    assert "UE1" in report.violations[0].detail
    with pytest.raises(FeasibilityError):
        apply_plan(ex1[0], TransmissionPlan({1, 2}), ex1[1])


def test_redundant_plan(ex2):
    assert en.REDUNDANCY in validate_plan(TransmissionPlan({0}, {1: {0}}), *ex2).rules


@pytest.mark.parametrize(
    "plan, rule",
    [
        (TransmissionPlan(set(), {0: {0}}), en.NOT_HELD),
        (TransmissionPlan(set(), {1: set()}), en.EMPTY_CODE),
        (TransmissionPlan(set(), {1: {0, 2}}), en.ADMISSIBILITY_D2D),
        (TransmissionPlan(set(), {0: {1}, 1: {0}}), en.CONFLICT),
        (TransmissionPlan(set(), {0: {1}, 2: {1}}), en.CONGESTION),
        (TransmissionPlan({5}), en.OUT_OF_RANGE),
        (TransmissionPlan(set(), {7: {0}}), en.OUT_OF_RANGE),
    ],
)
def test_rule_tags(ex2, plan, rule):
    assert rule in validate_plan(plan, *ex2).rules


def test_report_lists_every_violation(ex2):
    plan = TransmissionPlan({0, 2}, {0: {1}, 1: {0}})
    assert validate_plan(plan, *ex2).rules == {en.ADMISSIBILITY_BS, en.CONFLICT, en.REDUNDANCY}


def test_second_example_trace(ex2):
    state, c = ex2
    out = apply_plan(state, TransmissionPlan({1, 2}, {1: {0}}), c)
    got = {(r.user, r.packet, r.link) for r in out.recoveries}
    assert got == {
        (0, 2, "cellular"),
        (0, 0, "d2d"),
        (1, 1, "cellular"),
        (2, 2, "cellular"),
        (2, 0, "d2d"),
    }
    assert out.new_state.wants_set(3) == {0}


def test_empty_plan_changes_nothing(ex1):
    out = apply_plan(ex1[0], TransmissionPlan(), ex1[1])
    assert out.recoveries == () and out.new_state == ex1[0]


def test_irrelevant_plan_changes_nothing():
    state = SessionState.from_has_sets(3, [{0, 1}, {0}])
    c = ConnectionMatrix.fully_connected(2)
    out = apply_plan(state, TransmissionPlan({0}), c)
    assert out.new_state == state


def test_transmitter_still_hears_the_bs():
    state = SessionState.from_has_sets(2, [{0}, {1}])
    c = ConnectionMatrix.fully_connected(2)
    out = apply_plan(state, TransmissionPlan({1}, {0: {0}}), c)
    assert Recovery(0, 1, None) in out.recoveries
    assert is_complete(out.new_state)


def test_plan_describe_and_parse():
    assert NARRATIVE.describe() == "BS: p2+p4; UE2: p1+p3"
    assert TransmissionPlan.parse(NARRATIVE.describe()) == NARRATIVE
    assert TransmissionPlan.parse("idle") == TransmissionPlan()
    with pytest.raises(ValueError):
        TransmissionPlan.parse("relay: p1")


def test_random_feasible_plans_obey_slot_semantics():
    rng = np.random.default_rng(17)
    for _ in range(200):
        state, c = random_instance(rng, 6, 6)
        g = cg.build_two_layer(state, c)
        for _ in range(10):
            order = rng.permutation(len(g))
            chosen = 0
            for v in order:
                if not g.adj[v] & chosen:
                    chosen |= 1 << int(v)
            plan = cg.decode_independent_set(g, chosen)
            out = apply_plan(state, plan, c)
            per_link = {}
            for r in out.recoveries:
                per_link[(r.user, r.link)] = per_link.get((r.user, r.link), 0) + 1
            assert max(per_link.values(), default=0) <= 1
            if chosen:
                assert out.new_state.total_wants() < state.total_wants()
            # every BS vertex reaches all its wanters, every user vertex all wanting neighbours
            expected = set()
            for idx in range(len(g)):
                if chosen >> idx & 1:
                    v = g.vertices[idx]
                    reach = state.wanters[v.packet] & (~0 if v.is_bs else c.neighbors[v.transmitter])
                    expected |= {(u, v.packet, v.transmitter) for u in range(state.n_users) if reach >> u & 1}
            assert set(out.recoveries) == expected
