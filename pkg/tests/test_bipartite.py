import random

import pytest

from slimtw.bipartite import (Bipartition, TwinViolation, check_edge_bound, degeneracy, degeneracy_ordering,
                              good_pair_graph, good_pair_model, sample_good_pair_set, twin_classes)
from slimtw.graph import Graph, GraphError, complete, complete_bipartite, cycle, path, random_gnm
from slimtw.minors import verify_model
from oracles import random_tree


def as_sets(classes):
    return sorted(sorted(c) for c in classes)


def test_twin_class_examples():
    star = complete_bipartite(1, 3)
    assert as_sets(twin_classes(star)) == [[0], [1, 2, 3]]
    assert as_sets(twin_classes(cycle(4))) == [[0, 2], [1, 3]]
    assert as_sets(twin_classes(complete(5))) == [[0, 1, 2, 3, 4]]
    assert as_sets(twin_classes(path(4))) == [[0], [1], [2], [3]]


def test_twin_classes_are_maximal_and_closed():
    def twins(G, u, v):
        return G.neighbors(u) - {v} == G.neighbors(v) - {u}

    rng = random.Random(3)
    for _ in range(60):
        G = random_gnm(8, rng.randint(4, 18), rng.randrange(10 ** 6))
        classes = twin_classes(G)
        assert sorted(v for c in classes for v in c) == list(G.vertices)
        for c in classes:
            assert all(twins(G, u, v) for u in c for v in c if u != v)
            for w in set(G.vertices) - c:
                assert not all(twins(G, w, u) for u in c)


def test_bipartition_requires_stable_sides():
    assert Bipartition.of(cycle(4), [0, 2]).B == frozenset({1, 3})
    with pytest.raises(GraphError):
        Bipartition.of(cycle(4), [0, 1])


@pytest.mark.parametrize("G, expected", [
    (path(6), 1),
    (cycle(7), 2),
    (complete(5), 4),
    (Graph.from_edges(3, []), 0),
])
def test_degeneracy_values(G, expected):
    ordering = degeneracy_ordering(G)
    assert ordering.degeneracy == expected == degeneracy(G)
    assert max(ordering.forward_degrees(G), default=0) <= expected


def test_random_trees_have_degeneracy_one():
    rng = random.Random(8)
    assert all(degeneracy(random_tree(12, rng)) == 1 for _ in range(20))


def test_late_side_goes_last_in_k23():
    G = complete_bipartite(2, 3)
    order = degeneracy_ordering(G, late=[0, 1]).order
    first_late = min(order.index(0), order.index(1))
    assert all(order.index(v) < first_late for v in (2, 3, 4))


def test_late_rule_holds_on_random_graphs():
    rng = random.Random(21)
    for _ in range(50):
        G = random_gnm(10, rng.randint(9, 25), rng.randrange(10 ** 6))
        late = set(rng.sample(range(10), 4))
        ordering = degeneracy_ordering(G, late)
        delta = ordering.degeneracy
        assert max(ordering.forward_degrees(G)) <= delta
        alive = set(G.vertices)
        for v in ordering.order:
            if v in late:
                assert not any(len(G.neighbors(u) & alive) <= delta for u in alive - late)
            alive.discard(v)


def test_sampler_is_seeded_and_checks_delta():
    A = range(40)
    assert sample_good_pair_set(A, 3, 7) == sample_good_pair_set(A, 3, 7)
    assert sample_good_pair_set(A, 3, 7) != sample_good_pair_set(A, 3, 8)
    with pytest.raises(GraphError):
        sample_good_pair_set(A, 1, 0)


def test_single_witness_gives_an_edge():
    G = complete_bipartite(2, 1)
    bip = Bipartition.of(G, [0, 1])
    seed = next(s for s in range(200) if sample_good_pair_set([0, 1], 2, s) == {0, 1})
    gamma, X = good_pair_graph(G, bip, [0, 1], 2, seed)
    assert X == {0, 1} and gamma.edges() == [(0, 1)]


def test_empty_sample_gives_empty_graph():
    G = complete_bipartite(2, 1)
    bip = Bipartition.of(G, [0, 1])
    seed = next(s for s in range(200) if not sample_good_pair_set([0, 1], 2, s))
    gamma, X = good_pair_graph(G, bip, [0, 1], 2, seed)
    assert gamma.n == 0 and not X


def random_bipartite(n_a, n_b, p, rng):
    edges = [(u, n_a + v) for u in range(n_a) for v in range(n_b) if rng.random() < p]
    return Graph.from_edges(n_a + n_b, edges)


def test_good_pair_graph_is_an_induced_minor():
    rng = random.Random(2)
    nonempty = 0
    for seed in range(40):
        G = random_bipartite(6, 6, 0.4, rng)
        bip = Bipartition.of(G, range(6))
        gamma, _ = good_pair_graph(G, bip, bip.A, 2, seed)
        model = good_pair_model(G, gamma, bip.B)
        ok, problems = verify_model(G, model)
        assert ok, problems
        nonempty += gamma.m > 0
    assert nonempty > 5


def test_sample_must_lie_in_a():
    G = complete_bipartite(2, 2)
    with pytest.raises(GraphError):
        good_pair_graph(G, Bipartition.of(G, [0, 1]), [2], 2, 0)


def test_edge_bound_reports():
    star = complete_bipartite(1, 4)
    rep = check_edge_bound(star, Bipartition.of(star, [0]), 4, strict=False)
    assert rep == {"edges": 4, "bound": 4, "pass": True, "twin_violations": [[1, 2], [1, 3], [1, 4]]}
    matching = Graph.from_edges(6, [(0, 3), (1, 4), (2, 5)])
    assert check_edge_bound(matching, Bipartition.of(matching, [0, 1, 2]), 1)["pass"]
    assert not check_edge_bound(matching, Bipartition.of(matching, [0, 1, 2]), 0.5)["pass"]


def test_edge_bound_rejects_twins_in_b():
    G = complete_bipartite(2, 3)
    with pytest.raises(TwinViolation) as err:
        check_edge_bound(G, Bipartition.of(G, [0, 1]), 10)
    assert set(err.value.pair) <= {2, 3, 4}
