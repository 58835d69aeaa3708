import random

import pytest

from oracles import brute_max_anticomplete
from slimtw.graph import Graph, GraphError, complete_bipartite, cycle, hex_grid, path, random_gnm
from slimtw.slimness import (BudgetExhausted, PathFamily, check_path_family, check_tq_slim,
                             is_slim_pair, max_anticomplete_paths)


def k4_minus_edge():
    return Graph.from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3), (1, 2)])


@pytest.mark.parametrize("G, a, b, cap, expected", [
    (cycle(4), 0, 2, 2, 2),
    (k4_minus_edge(), 0, 3, 2, 1),
    (Graph.from_edges(4, [(0, 1), (2, 3)]), 0, 3, 3, 0),
    (complete_bipartite(2, 5), 0, 1, 9, 5),
    (complete_bipartite(3, 3), 0, 1, 9, 3),
    (cycle(8), 0, 4, 5, 2),
])
def test_family_sizes(G, a, b, cap, expected):
    fam = max_anticomplete_paths(G, a, b, cap)
    assert len(fam) == expected
    assert check_path_family(G, fam) == []


def test_cap_limits_the_family():
    assert len(max_anticomplete_paths(complete_bipartite(2, 5), 0, 1, 3)) == 3
    assert len(max_anticomplete_paths(cycle(4), 0, 2, 0)) == 0


def test_adjacent_or_equal_pair_rejected():
    with pytest.raises(GraphError):
        max_anticomplete_paths(path(3), 0, 1, 2)
    with pytest.raises(GraphError):
        is_slim_pair(path(3), 1, 1, 2)


def test_slim_pair_examples():
    assert is_slim_pair(cycle(4), 0, 2, 3)
    assert not is_slim_pair(cycle(4), 0, 2, 2)
    assert is_slim_pair(path(3), 0, 2, 2)


def test_small_graphs_agree_with_enumeration():
    rng = random.Random(11)
    checked = 0
    for _ in range(120):
        n = rng.randint(4, 8)
        G = random_gnm(n, rng.randint(n - 1, min(n * (n - 1) // 2, 2 * n)), rng.randrange(10 ** 6))
        for a in G.vertices:
            for b in G.vertices:
                if a < b and not G.has_edge(a, b):
                    fam = max_anticomplete_paths(G, a, b, n)
                    assert check_path_family(G, fam) == []
                    assert len(fam) == brute_max_anticomplete(G, a, b), (G.edges(), a, b)
                    checked += 1
    assert checked > 200


def test_wideness_is_monotone_in_s():
    rng = random.Random(5)
    for _ in range(40):
        G = random_gnm(9, 14, rng.randrange(10 ** 6))
        pairs = [(a, b) for a in G for b in G if a < b and not G.has_edge(a, b)]
        a, b = rng.choice(pairs)
        wide = [not is_slim_pair(G, a, b, s) for s in range(1, 6)]
        # once a pair stops being wide it never becomes wide again
        assert wide == sorted(wide, reverse=True)


def test_checker_reports_each_defect():
    G = cycle(6)
    bad_end = PathFamily(0, 3, ((0, 1, 2),))
    assert "does not run" in check_path_family(G, bad_end)[0]
    chord = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 2)])
    assert any("not induced" in p for p in check_path_family(chord, PathFamily(0, 3, ((0, 1, 2, 3),))))
    shared = PathFamily(0, 3, ((0, 1, 2, 3), (0, 1, 2, 3)))
    assert any("intersect" in p for p in check_path_family(G, shared))
    touching = Graph.from_edges(4, [(0, 1), (1, 3), (0, 2), (2, 3), (1, 2)])
    fam = PathFamily(0, 3, ((0, 1, 3), (0, 2, 3)))
    assert any("anticomplete" in p for p in check_path_family(touching, fam))


def test_tq_slim_examples():
    assert check_tq_slim(cycle(8), 2, 3).ok
    res = check_tq_slim(complete_bipartite(3, 3), 2, 3)
    assert not res.ok
    u, v = res.stable_set
    fam = res.families[(u, v)]
    assert len(fam) == 3 and check_path_family(complete_bipartite(3, 3), fam) == []


def test_tq_slim_vacuous_without_stable_set():
    from slimtw.graph import complete
    assert check_tq_slim(complete(5), 2, 1).ok


def test_hex_grid_has_three_wide_pairs():
    G = hex_grid(2)
    res = check_tq_slim(G, 2, 3)
    assert not res.ok
    assert all(len(f) >= 3 and check_path_family(G, f) == [] for f in res.families.values())


def test_tq_slim_rejects_small_t():
    with pytest.raises(GraphError):
        check_tq_slim(cycle(5), 1, 2)


def test_budget_is_enforced():
    with pytest.raises(BudgetExhausted):
        max_anticomplete_paths(complete_bipartite(2, 8), 0, 1, 8, budget=3)
