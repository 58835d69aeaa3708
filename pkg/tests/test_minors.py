import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import to_nx
from slimtw.graph import (Graph, GraphError, caterpillar, complete, complete_bipartite, cycle, hex_grid, path,
                          random_gnm)
from slimtw.minors import (MinorModel, class_membership, clique_below, contract_connected_sets,
                           find_induced_minor, max_clique, verify_model)


def test_cycle_contains_shorter_cycle():
    res = find_induced_minor(cycle(7), cycle(4))
    assert res.status == "found"
    assert verify_model(cycle(7), res.model)[0]


def test_tree_has_no_cycle_minor():
    assert find_induced_minor(caterpillar(5), cycle(3)).status == "not-found"


def test_induced_minor_is_stricter_than_minor():
    # hub plus three arcs of the rim give K4; complete graphs only contract to complete graphs
    wheel = Graph.from_edges(6, [(0, i) for i in range(1, 6)] + [(i, i % 5 + 1) for i in range(1, 6)])
    assert find_induced_minor(wheel, complete(4)).status == "found"
    assert find_induced_minor(complete(5), path(3)).status == "not-found"


def test_budget_exhaustion_is_reported():
    res = find_induced_minor(hex_grid(3), complete_bipartite(3, 3), budget=5)
    assert res.status == "budget-exhausted"


def test_verify_model_catches_each_violation():
    G = path(4)
    pattern = Graph.from_edges(2, [])
    ok, problems = verify_model(G, MinorModel(pattern, (frozenset({0}), frozenset({1}))))
    assert not ok and "touch" in problems[0]
    ok, problems = verify_model(G, MinorModel(Graph.from_edges(2, [(0, 1)]), (frozenset({0}), frozenset({2}))))
    assert not ok and "anticomplete" in problems[0]
    ok, problems = verify_model(G, MinorModel(pattern, (frozenset({0, 2}), frozenset({3}))))
    assert not ok and "disconnected" in problems[0]
    with pytest.raises(GraphError):
        verify_model(G, MinorModel(pattern, (frozenset({0}),)))


def test_model_json_round_trip():
    res = find_induced_minor(cycle(6), cycle(4))
    again = MinorModel.from_json(res.model.to_json())
    assert again == res.model


def test_contract_connected_sets():
    H, rep = contract_connected_sets(path(4), [{1, 2}])
    assert H.edges() == [(0, 1), (1, 3)]
    assert rep == {0: 0, 1: 1, 2: 1, 3: 3}
    with pytest.raises(GraphError):
        contract_connected_sets(path(4), [{0, 2}])


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 14), st.integers(0, 40), st.integers(0, 10**6))
def test_max_clique_matches_networkx(n, m, seed):
    G = random_gnm(n, min(m, n * (n - 1) // 2), seed)
    K = max_clique(G)
    assert all(G.has_edge(u, v) for u in K for v in K if u != v)
    assert len(K) == max(len(c) for c in nx.find_cliques(to_nx(G)))


def test_clique_below():
    assert clique_below(cycle(5), 3)
    assert not clique_below(complete(4), 4)
    with pytest.raises(GraphError):
        clique_below(cycle(5), 0)


def test_class_membership():
    member = class_membership(hex_grid(2), 2)
    assert member.status == "not_in_Ct" and verify_model(hex_grid(2), member.model)[0]
    assert class_membership(caterpillar(4), 2).status == "in_Ct"
    assert class_membership(complete_bipartite(3, 3), 3).pattern_name == "K_tt"
