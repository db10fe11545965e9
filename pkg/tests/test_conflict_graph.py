import numpy as np
import pytest

from d2d_idnc import conflict_graph as cg
from d2d_idnc.conflict_graph import Vertex as V
from d2d_idnc.engine import TransmissionPlan, validate_plan
from d2d_idnc.errors import FeasibilityError
from d2d_idnc.session import SessionState
from d2d_idnc.topology import ConnectionMatrix

from _instances import random_instance

BS1, BS2, BS3 = V(None, 0), V(None, 1), V(None, 2)
U2P1, U2P3, U1P2, U3P2 = V(1, 0), V(1, 2), V(0, 1), V(2, 1)


def edge(a, b):
    return frozenset((a, b))


def test_higher_layer_second_example(ex2):
    g = cg.build_higher_layer(ex2[0])
    assert set(g.vertices) == {BS1, BS2, BS3}
    assert g.edge_set() == {edge(BS1, BS3)}


def test_higher_layer_first_example(ex1):
    g = cg.build_higher_layer(ex1[0])
    assert [v.packet for v in g.vertices] == [0, 1, 2, 3]
    assert g.edge_set() == {edge(V(None, 1), V(None, 2)), edge(V(None, 0), V(None, 3))}


def test_small_wants_give_edgeless_higher_layer():
    state = SessionState.from_has_sets(3, [{0, 1}, {1, 2}, {0, 2}])
    assert cg.build_higher_layer(state).n_edges == 0


def test_lower_layer_second_example(ex2):
    state, c = ex2
    g = cg.build_lower_layer(state, c)
    assert set(g.vertices) == {U2P1, U2P3, U1P2, U3P2}
    listed = {
        edge(U2P1, U2P3),
        edge(U1P2, U2P1),
        edge(U1P2, U2P3),
        edge(U3P2, U2P1),
        edge(U3P2, U2P3),
    }
    assert listed <= g.edge_set()
    assert g.edge_set() - listed == {edge(U1P2, U3P2)}


def test_lower_layer_edge_reasons(ex2):
    g = cg.build_lower_layer(*ex2)
    reason = {frozenset((g.vertices[u], g.vertices[v])): r for (u, v), r in g.edge_reason.items()}
    assert reason[edge(U2P1, U2P3)] == {cg.C1}
    assert reason[edge(U1P2, U3P2)] == {cg.C2}
    assert reason[edge(U1P2, U2P1)] == {cg.C3}


def test_two_layer_second_example(ex2):
    g = cg.build_two_layer(*ex2)
    # 1 cellular edge, the complete K4 of the user layer, 4 redundancy edges
    assert len(g) == 7 and g.n_edges == 11
    redundancy = {e for e in g.edge_set() if any(v.is_bs for v in e) and not all(v.is_bs for v in e)}
    assert redundancy == {edge(BS1, U2P1), edge(BS2, U1P2), edge(BS2, U3P2), edge(BS3, U2P3)}


def test_all_singletons_two_layer_equals_higher():
    state = SessionState.from_has_sets(3, [{0}, {1}, {2}])
    c = ConnectionMatrix.from_edges(3, [])
    two, high = cg.build_two_layer(state, c), cg.build_higher_layer(state)
    assert two.vertices == high.vertices and two.adj == high.adj


def test_decode_independent_set(ex2):
    g = cg.build_two_layer(*ex2)
    plan = cg.decode_independent_set(g, cg.vertex_set(g, [BS2, BS3, U2P1]))
    assert plan == TransmissionPlan({1, 2}, {1: {0}})
    assert cg.decode_independent_set(g, 0).is_empty


def test_decode_rejects_redundant_pair(ex2):
    g = cg.build_two_layer(*ex2)
    with pytest.raises(FeasibilityError, match="redundancy"):
        cg.decode_independent_set(g, cg.vertex_set(g, [BS1, U2P1]))


def test_dimension_mismatch(ex2):
    with pytest.raises(ValueError):
        cg.build_two_layer(ex2[0], ConnectionMatrix.fully_connected(3))


def test_dot_export(ex2):
    dot = cg.build_two_layer(*ex2).to_dot()
    assert dot.count("shape=box") == 3 and dot.count("shape=ellipse") == 4
    assert dot.count(" -- ") == 11
    assert '"u1:p2" -- "u3:p2" [label="C2"]' in dot


def _layer_edges(g, mask):
    return {(g.vertices[u], g.vertices[v]) for u, v in g.edges() if mask >> u & 1 and mask >> v & 1}


def test_layer_consistency_and_vertex_rules():
    rng = np.random.default_rng(5)
    for _ in range(200):
        state, c = random_instance(rng, 6, 6)
        high, low, two = cg.build_higher_layer(state), cg.build_lower_layer(state, c), cg.build_two_layer(state, c)
        assert two.vertices == high.vertices + low.vertices
        assert _layer_edges(two, two.layer_mask(True)) == _layer_edges(high, (1 << len(high)) - 1)
        assert _layer_edges(two, two.layer_mask(False)) == _layer_edges(low, (1 << len(low)) - 1)
        for v in two.vertices:
            if v.is_bs:
                assert state.wanters[v.packet]
            else:
                assert state.wanters[v.packet] & c.neighbors[v.transmitter]
                assert state.has[v.transmitter] >> v.packet & 1


def test_every_edge_has_a_reason_matching_a_plan_rule():
    rng = np.random.default_rng(9)
    for _ in range(100):
        state, c = random_instance(rng, 5, 5)
        g = cg.build_two_layer(state, c)
        for (u, v), why in g.edge_reason.items():
            assert why
            plan = cg.plan_from_vertices(g, (1 << u) | (1 << v))
            assert not validate_plan(plan, state, c).ok
