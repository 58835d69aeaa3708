"""Induced-minor models: checking, bounded search, contraction, class membership."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph import (Graph, GraphError, complete_bipartite, components,
                    hex_grid, is_connected_set)

__all__ = [
    "MinorModel",
    "SearchResult",
    "verify_model",
    "find_induced_minor",
    "contract_connected_sets",
    "class_membership",
    "clique_below",
    "max_clique",
]


@dataclass(frozen=True)
class MinorModel:
    """Branch set ``branch_sets[i]`` realises vertex ``i`` of ``pattern``."""

    pattern: Graph
    branch_sets: tuple[frozenset[int], ...]

    def to_json(self) -> dict:
        return {
            "pattern": {"n": self.pattern.n, "edges": [list(e) for e in self.pattern.edges()]},
            "branch_sets": [sorted(s) for s in self.branch_sets],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MinorModel":
        pat = data["pattern"]
        H = Graph.from_edges(pat["n"], [tuple(e) for e in pat["edges"]])
        return cls(H, tuple(frozenset(s) for s in data["branch_sets"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def verify_model(G: Graph, model: MinorModel) -> tuple[bool, list[str]]:
    """Check disjointness, connectivity and the adjacency pattern.

    Returns ``(ok, violations)`` where each violation names the offending
    branch set or pair.
    """
    H = model.pattern
    sets = model.branch_sets
    if len(sets) != H.n:
        raise GraphError(f"model has {len(sets)} branch sets for a pattern on {H.n} vertices")
    for s in sets:
        G.check_vertices(s)
    problems = []
    for i, s in enumerate(sets):
        if not is_connected_set(G, s):
            problems.append(f"branch set {i} is empty or disconnected")
    for i in range(H.n):
        for j in range(i + 1, H.n):
            if sets[i] & sets[j]:
                problems.append(f"branch sets {i} and {j} overlap")
                continue
            touching = any(G.neighbors(v) & sets[j] for v in sets[i])
            if touching and not H.has_edge(i, j):
                problems.append(f"branch sets {i} and {j} touch but {i}{j} is not an edge")
            elif not touching and H.has_edge(i, j):
                problems.append(f"branch sets {i} and {j} are anticomplete but {i}{j} is an edge")
    return not problems, problems


@dataclass(frozen=True)
class SearchResult:
    status: str  # "found" | "not-found" | "budget-exhausted"
    model: MinorModel | None = None
    expansions: int = 0


class _Budget(Exception):
    pass


def _cyclomatic(G: Graph) -> int:
    return G.m - G.n + len(components(G))


def _search_order(H: Graph) -> list[int]:
    """BFS order of the pattern, starting each component at a max-degree vertex."""
    order: list[int] = []
    seen: set[int] = set()
    for root in sorted(H.vertices, key=lambda v: (-H.degree(v), v)):
        if root in seen:
            continue
        seen.add(root)
        queue = [root]
        while queue:
            v = queue.pop(0)
            order.append(v)
            for u in sorted(H.neighbors(v), key=lambda u: (-H.degree(u), u)):
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
    return order


def find_induced_minor(G: Graph, H: Graph, budget: int = 200_000) -> SearchResult:
    """Search for an induced ``H``-model in ``G``.

    Branch sets are assigned to the pattern vertices in BFS order.  For each
    pattern vertex the candidates are the connected vertex sets of the region
    left free by earlier choices (unused and not adjacent to branch sets of
    earlier non-neighbours) that touch every earlier neighbour's branch set.
    ``budget`` bounds the number of candidate sets examined; running out gives
    ``budget-exhausted`` rather than a wrong ``not-found``.
    """
    if budget <= 0:
        raise GraphError("budget must be positive")
    if H.n < 1:
        raise GraphError("pattern must have at least one vertex")
    if H.n > G.n or H.m > G.m or _cyclomatic(H) > _cyclomatic(G):
        return SearchResult("not-found", None, 0)

    order = _search_order(H)
    nbr = {v: G.neighbors(v) for v in G.vertices}
    all_vertices = frozenset(G.vertices)
    count = [0]
    chosen: dict[int, frozenset[int]] = {}

    def closed_nbhd(S: frozenset[int]) -> set[int]:
        out = set(S)
        for v in S:
            out |= nbr[v]
        return out

    def region_for(h: int, used: set[int]) -> set[int]:
        region = set(all_vertices - used)
        for k, S in chosen.items():
            if not H.has_edge(h, k):
                region -= closed_nbhd(S)
        return region

    def feasible_future(used: set[int], start: int) -> bool:
        # every later pattern vertex needs one component of its region touching
        # all already-placed neighbours
        for h in order[start:]:
            region = region_for(h, used)
            need = [chosen[k] for k in H.neighbors(h) if k in chosen]
            if not region:
                return False
            if not need:
                continue
            placed = set().union(*need) if need else set()
            ok = False
            seen: set[int] = set()
            for s in region:
                if s in seen:
                    continue
                comp = {s}
                stack = [s]
                while stack:
                    v = stack.pop()
                    for u in nbr[v]:
                        if u in region and u not in comp:
                            comp.add(u)
                            stack.append(u)
                seen |= comp
                touch = closed_nbhd(frozenset(comp)) & placed
                if all(touch & S for S in need):
                    ok = True
                    break
            if not ok:
                return False
        return True

    def connected_sets(region: set[int]):
        """Every connected subset of ``region`` exactly once (ESU enumeration)."""
        for anchor in sorted(region):
            ext = {u for u in nbr[anchor] if u in region and u > anchor}
            yield from _extend(frozenset([anchor]), ext, anchor, region)

    def _extend(S: frozenset[int], ext: set[int], anchor: int, region: set[int]):
        count[0] += 1
        if count[0] > budget:
            raise _Budget
        yield S
        ext = set(ext)
        closed = closed_nbhd(S)
        while ext:
            w = min(ext)
            ext.discard(w)
            exclusive = {u for u in nbr[w]
                         if u in region and u > anchor and u not in closed}
            yield from _extend(S | {w}, ext | exclusive, anchor, region)

    def assign(i: int, used: set[int]) -> bool:
        if i == len(order):
            return True
        h = order[i]
        region = region_for(h, used)
        need = [chosen[k] for k in H.neighbors(h) if k in chosen]
        for S in connected_sets(region):
            closed = closed_nbhd(S)
            if not all(closed & T for T in need):
                continue
            chosen[h] = S
            if feasible_future(used | S, i + 1) and assign(i + 1, used | S):
                return True
            del chosen[h]
        return False

    try:
        found = assign(0, set())
    except _Budget:
        return SearchResult("budget-exhausted", None, count[0])
    if not found:
        return SearchResult("not-found", None, count[0])
    model = MinorModel(H, tuple(chosen[v] for v in range(H.n)))
    ok, problems = verify_model(G, model)
    assert ok, problems
    return SearchResult("found", model, count[0])


def contract_connected_sets(G: Graph, parts: Sequence[Iterable[int]]) -> tuple[Graph, dict[int, int]]:
    """Contract each part to a single vertex labelled by its smallest member.

    Returns the contracted graph and the map from every original vertex to its
    new label.  Uncontracted vertices keep their labels.
    """
    parts = [G.check_vertices(p) for p in parts]
    seen: set[int] = set()
    for p in parts:
        if not is_connected_set(G, p):
            raise GraphError(f"part {sorted(p)} is empty or disconnected")
        if seen & p:
            raise GraphError(f"part {sorted(p)} overlaps another part")
        seen |= p
    rep = {v: v for v in G.vertices}
    for p in parts:
        r = min(p)
        for v in p:
            rep[v] = r
    adj: dict[int, set[int]] = {r: set() for r in set(rep.values())}
    for u, v in G.edges():
        ru, rv = rep[u], rep[v]
        if ru != rv:
            adj[ru].add(rv)
            adj[rv].add(ru)
    return Graph(adj), rep


def max_clique(G: Graph, stop_at: int | None = None) -> frozenset[int]:
    """Maximum clique by branch and bound (greedy-colouring bound).

    With ``stop_at`` the search returns as soon as a clique of that size is found.
    """
    best: list[frozenset[int]] = [frozenset()]

    def color_bound(cands: list[int]) -> list[tuple[int, int]]:
        colors: list[list[int]] = []
        out = []
        for v in cands:
            for k, cls in enumerate(colors):
                if not any(G.has_edge(v, u) for u in cls):
                    cls.append(v)
                    out.append((v, k + 1))
                    break
            else:
                colors.append([v])
                out.append((v, len(colors)))
        return sorted(out, key=lambda p: p[1])

    def expand(clique: list[int], cands: list[int]) -> bool:
        for v, bound in reversed(color_bound(cands)):
            if len(clique) + bound <= len(best[0]):
                return False
            new = clique + [v]
            rest = [u for u in cands if u in G.neighbors(v)]
            if len(new) > len(best[0]):
                best[0] = frozenset(new)
                if stop_at is not None and len(new) >= stop_at:
                    return True
            if rest and expand(new, rest):
                return True
            cands = [u for u in cands if u != v]
        return False

    expand([], sorted(G.vertices, key=lambda v: -G.degree(v)))
    return best[0]


def clique_below(G: Graph, t: int) -> bool:
    """True iff ``G`` has no clique of size ``t``."""
    if t < 1:
        raise GraphError("t must be positive")
    return len(max_clique(G, stop_at=t)) < t


@dataclass(frozen=True)
class Membership:
    status: str  # "in_Ct" | "not_in_Ct" | "unknown"
    model: MinorModel | None = None
    pattern_name: str | None = None


def class_membership(G: Graph, t: int, budget: int = 200_000) -> Membership:
    """Decide whether ``G`` excludes both ``K_{t,t}`` and ``W_{t x t}`` as induced minors."""
    if t < 1:
        raise GraphError("t must be positive")
    if budget <= 0:
        raise GraphError("budget must be positive")
    unknown = False
    for name, H in (("K_tt", complete_bipartite(t, t)), ("W_txt", hex_grid(t))):
        res = find_induced_minor(G, H, budget)
        if res.status == "found":
            return Membership("not_in_Ct", res.model, name)
        if res.status == "budget-exhausted":
            unknown = True
    return Membership("unknown" if unknown else "in_Ct")
