import numpy as np
import pytest

from d2d_idnc.errors import InvalidSpecError
from d2d_idnc.session import (
    ErasureSpec,
    SessionState,
    demand_count,
    dumps_session,
    generate_feedback,
    is_complete,
    loads_session,
    read_session,
    s_bs,
)


def test_first_example_has_and_wants(ex1):
    state, _ = ex1
    assert [state.has_set(u) for u in range(3)] == [{0, 3}, {0, 1, 2}, {1, 2}]
    assert [state.wants_set(u) for u in range(3)] == [{1, 2}, {3}, {0, 3}]
    assert state.total_wants() == 5


def test_feedback_matrix_round_trip(ex1):
    state, _ = ex1
    f = state.feedback
    assert f.shape == (4, 3)
    assert SessionState.from_feedback(f) == state


def test_extreme_erasure_probabilities():
    assert is_complete(generate_feedback(5, 7, ErasureSpec(0.0, 3)))
    lost = generate_feedback(5, 7, ErasureSpec(1.0, 3))
    assert all(lost.wants_set(u) == set(range(7)) for u in range(5))


def test_generation_is_seeded():
    a = generate_feedback(6, 9, ErasureSpec(0.4, 11))
    assert a == generate_feedback(6, 9, ErasureSpec(0.4, 11))
    assert a != generate_feedback(6, 9, ErasureSpec(0.4, 12))


def test_erasure_rate_is_respected():
    state = generate_feedback(50, 200, ErasureSpec(0.25, 0))
    rate = state.total_wants() / (50 * 200)
    assert abs(rate - 0.25) < 0.02


def test_s_bs(ex1, ex2):
    assert s_bs(ex1[0]) == frozenset()
    assert s_bs(ex2[0]) == frozenset()
    lonely = SessionState.from_has_sets(3, [{0}, {0, 1}])
    assert s_bs(lonely) == {2}


def test_demand_count(ex1):
    state, _ = ex1
    assert demand_count(state, 3) == 2
    assert demand_count(state, 1) == 1
    assert demand_count(SessionState.from_has_sets(2, [{0, 1}, {0}]), 0) == 0
    with pytest.raises(IndexError):
        demand_count(state, 4)


def test_is_complete(ex1):
    state, _ = ex1
    assert not is_complete(state)
    done = state.with_recoveries((u, p) for u in range(3) for p in state.wants_set(u))
    assert is_complete(done)
    assert is_complete(SessionState.from_feedback(np.ones((3, 2), dtype=int)))


def test_fixture_format(data_dir, ex1):
    assert read_session(data_dir / "example1.session") == ex1[0]
    text = dumps_session(ex1[0])
    assert "has 1: 1 4" in text
    assert loads_session(text) == ex1[0]


def test_empty_has_set_round_trips():
    state = SessionState.from_has_sets(2, [set(), {1}])
    assert loads_session(dumps_session(state)) == state


@pytest.mark.parametrize(
    "text",
    [
        "users 1\nhas 1: 1\n",
        "packets 2\nusers 1\nhas 1: 3\n",
        "packets 2\nusers 1\nhas 2: 1\n",
        "packets 2\nusers 1\nhas 1: a\n",
    ],
)
def test_malformed_session(text):
    with pytest.raises(InvalidSpecError):
        loads_session(text)


@pytest.mark.parametrize("p", [-0.1, 1.1])
def test_erasure_spec_validates(p):
    with pytest.raises(InvalidSpecError):
        ErasureSpec(p)
