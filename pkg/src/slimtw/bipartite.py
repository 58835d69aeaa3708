"""Twin classes, degeneracy orderings with a late set, and the good-pair graph."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable

from .graph import Graph, GraphError
from .minors import MinorModel

__all__ = [
    "Bipartition",
    "DegenerateOrdering",
    "TwinViolation",
    "twin_classes",
    "degeneracy",
    "degeneracy_ordering",
    "sample_good_pair_set",
    "good_pair_graph",
    "good_pair_model",
    "check_edge_bound",
]


@dataclass(frozen=True)
class Bipartition:
    A: frozenset[int]
    B: frozenset[int]

    @classmethod
    def of(cls, G: Graph, A: Iterable[int]) -> "Bipartition":
        """Take ``A`` as one side and the rest of ``G`` as the other, checking both are stable."""
        A = G.check_vertices(A)
        B = frozenset(G.vertices) - A
        for side in (A, B):
            for v in side:
                if G.neighbors(v) & side:
                    raise GraphError(f"side containing {v} is not stable")
        return cls(A, B)


@dataclass(frozen=True)
class DegenerateOrdering:
    order: tuple[int, ...]
    degeneracy: int

    def forward_degrees(self, G: Graph) -> list[int]:
        pos = {v: i for i, v in enumerate(self.order)}
        return [sum(1 for u in G.neighbors(v) if pos[u] > pos[v]) for v in self.order]


class TwinViolation(GraphError):
    def __init__(self, pair: tuple[int, int]):
        super().__init__(f"vertices {pair[0]} and {pair[1]} are twins")
        self.pair = pair


def twin_classes(G: Graph) -> list[frozenset[int]]:
    """Partition ``V(G)`` into maximal sets of pairwise twins.

    ``u`` and ``v`` are twins when ``N(u) - {v} == N(v) - {u}``.  Non-adjacent
    twins share their open neighbourhood and adjacent twins their closed one; a
    vertex cannot have twins of both kinds, so grouping by either key and
    merging gives the partition.
    """
    groups: dict[tuple[str, frozenset[int]], set[int]] = {}
    for v in G.vertices:
        groups.setdefault(("open", G.neighbors(v)), set()).add(v)
        groups.setdefault(("closed", G.neighbors(v) | {v}), set()).add(v)
    cls_of: dict[int, frozenset[int]] = {v: frozenset([v]) for v in G.vertices}
    for members in groups.values():
        if len(members) > 1:
            merged = frozenset(members)
            for v in members:
                cls_of[v] = merged
    seen, out = set(), []
    for v in G.vertices:
        c = cls_of[v]
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def degeneracy(G: Graph) -> int:
    return degeneracy_ordering(G).degeneracy


def _peel(G: Graph, pick) -> list[int]:
    deg = {v: G.degree(v) for v in G.vertices}
    alive = set(G.vertices)
    order = []
    while alive:
        v = pick(alive, deg)
        order.append(v)
        alive.discard(v)
        for u in G.neighbors(v):
            if u in alive:
                deg[u] -= 1
    return order


def degeneracy_ordering(G: Graph, late: Iterable[int] = ()) -> DegenerateOrdering:
    """Peeling order with every vertex having at most ``degeneracy`` later neighbours.

    Vertices of ``late`` are delayed: one is peeled only when no other vertex
    of degree at most the degeneracy remains.
    """
    late = G.check_vertices(late)
    classic = _peel(G, lambda alive, deg: min(alive, key=lambda v: (deg[v], v)))
    delta = max(DegenerateOrdering(tuple(classic), 0).forward_degrees(G), default=0)

    def pick(alive, deg):
        ready = [v for v in alive if deg[v] <= delta]
        early = [v for v in ready if v not in late]
        return min(early or ready)

    return DegenerateOrdering(tuple(_peel(G, pick)), delta)


def sample_good_pair_set(A2: Iterable[int], delta: int, seed: int) -> frozenset[int]:
    """Keep each vertex independently with probability ``1/delta``."""
    if delta < 2:
        raise GraphError("delta must be at least 2")
    rng = random.Random(seed)
    return frozenset(v for v in sorted(A2) if rng.random() < 1 / delta)


def _witnesses(G: Graph, B2: Iterable[int], X: frozenset[int]) -> dict[tuple[int, int], int]:
    found: dict[tuple[int, int], int] = {}
    for b in sorted(B2):
        hit = G.neighbors(b) & X
        if len(hit) == 2:
            found.setdefault(tuple(sorted(hit)), b)
    return found


def good_pair_graph(G: Graph, bip: Bipartition, A2: Iterable[int], delta: int, seed: int,
                    B2: Iterable[int] | None = None) -> tuple[Graph, frozenset[int]]:
    """Sample ``X`` from ``A2`` and join ``u, v`` when some ``b`` in ``B2`` sees exactly them.

    ``B2`` defaults to the whole ``B`` side.  Returns the graph on ``X``
    (original labels) together with ``X``.
    """
    A2 = G.check_vertices(A2)
    if not A2 <= bip.A:
        raise GraphError("sampled side must lie in A")
    X = sample_good_pair_set(A2, delta, seed)
    B2 = bip.B if B2 is None else G.check_vertices(B2)
    adj: dict[int, set[int]] = {u: set() for u in X}
    for u, v in _witnesses(G, B2, X):
        adj[u].add(v)
        adj[v].add(u)
    return Graph(adj), X


def good_pair_model(G: Graph, gamma: Graph, B2: Iterable[int]) -> MinorModel:
    """Induced-minor model of ``gamma`` in ``G``: each witness joins its pair's smaller end."""
    X = frozenset(gamma.vertices)
    index = {v: i for i, v in enumerate(gamma.vertices)}
    sets = {v: {v} for v in X}
    for (u, _v), b in _witnesses(G, B2, X).items():
        sets[u].add(b)
    pattern = Graph.from_edges(gamma.n, [(index[u], index[v]) for u, v in gamma.edges()])
    return MinorModel(pattern, tuple(frozenset(sets[v]) for v in gamma.vertices))


def check_edge_bound(G: Graph, bip: Bipartition, f_bound: float, strict: bool = True) -> dict:
    """Compare ``|E|`` with ``f_bound * |A|``.

    Twins inside ``B`` raise :class:`TwinViolation` unless ``strict`` is off,
    in which case every offending pair is listed in ``twin_violations``.
    """
    violations = []
    for cls in twin_classes(G):
        inside = sorted(cls & bip.B)
        if len(inside) > 1:
            if strict:
                raise TwinViolation((inside[0], inside[1]))
            violations += [[inside[0], v] for v in inside[1:]]
    bound = f_bound * len(bip.A)
    return {"edges": G.m, "bound": bound, "pass": G.m <= bound, "twin_violations": violations}
