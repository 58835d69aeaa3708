"""Wide and slim vertex pairs, decided by exhaustive search over induced paths."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator

from .graph import Graph, GraphError, component_of, min_separator

__all__ = [
    "BudgetExhausted",
    "PathFamily",
    "induced_paths",
    "max_anticomplete_paths",
    "is_slim_pair",
    "check_path_family",
    "check_tq_slim",
    "SlimCheck",
]


class BudgetExhausted(RuntimeError):
    """The search ran out of its step budget before reaching a verdict."""


@dataclass(frozen=True)
class PathFamily:
    a: int
    b: int
    paths: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.paths)

    def interiors(self) -> list[frozenset[int]]:
        return [frozenset(p[1:-1]) for p in self.paths]


class _Counter:
    def __init__(self, budget: int | None):
        self.left = budget

    def tick(self) -> None:
        if self.left is not None:
            self.left -= 1
            if self.left < 0:
                raise BudgetExhausted("path search budget exhausted")


def induced_paths(G: Graph, a: int, b: int, blocked: frozenset[int] = frozenset(),
                  first_after: int = -1, counter: _Counter | None = None) -> Iterator[tuple[int, ...]]:
    """Induced ``a``-``b`` paths of ``G \\ blocked``.

    Only paths whose second vertex is larger than ``first_after`` are produced.
    """
    counter = counter or _Counter(None)
    nb_b = G.neighbors(b)
    if b in blocked or a in blocked:
        return

    def dfs(path: list[int], forbidden: set[int]):
        counter.tick()
        last = path[-1]
        if last in nb_b:
            yield tuple(path) + (b,)
            return
        # vertices adjacent to an earlier path vertex can no longer be used
        reach = component_of(G, last, forbidden | {a})
        if b not in reach:
            return
        for u in sorted(G.neighbors(last)):
            if u in forbidden or u == a or u == b:
                continue
            path.append(u)
            yield from dfs(path, forbidden | G.neighbors(last) - {u} | {last})
            path.pop()

    base = set(blocked) | {a}
    for v in sorted(G.neighbors(a)):
        if v == b or v in blocked or v <= first_after:
            continue
        yield from dfs([a, v], base | (G.neighbors(a) - {v}))


def _check_pair(G: Graph, a: int, b: int) -> None:
    G.check_vertices((a, b))
    if a == b:
        raise GraphError("a and b must be distinct")
    if G.has_edge(a, b):
        raise GraphError(f"{a} and {b} are adjacent")


def max_anticomplete_paths(G: Graph, a: int, b: int, cap: int,
                           budget: int | None = None) -> PathFamily:
    """Largest family (up to ``cap``) of induced ``a``-``b`` paths with pairwise
    disjoint, pairwise anticomplete interiors.

    Paths are added in increasing order of their first interior vertex; once a
    path is chosen, the closed neighbourhood of its interior is blocked for the
    remaining ones.  A family smaller than ``cap`` is returned only after the
    search space is exhausted, so it is then a maximum.
    """
    _check_pair(G, a, b)
    if cap < 0:
        raise GraphError("cap must be non-negative")
    if cap == 0 or b not in component_of(G, a):
        return PathFamily(a, b, ())
    counter = _Counter(budget)
    upper = min(cap, len(min_separator(G, a, b)))
    best: list[tuple[int, ...]] = []

    def extend(chosen: list[tuple[int, ...]], blocked: frozenset[int], first_after: int) -> bool:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
            if len(best) >= upper:
                return True
        room = [v for v in G.neighbors(a) if v > first_after and v not in blocked and v != b]
        if len(chosen) + len(room) <= len(best):
            return False
        for p in induced_paths(G, a, b, blocked, first_after, counter):
            interior = p[1:-1]
            closed = set(interior)
            for v in interior:
                closed |= G.neighbors(v)
            closed -= {a, b}
            chosen.append(p)
            if extend(chosen, blocked | closed, p[1]):
                return True
            chosen.pop()
        return False

    extend([], frozenset(), -1)
    return PathFamily(a, b, tuple(best))


def is_slim_pair(G: Graph, a: int, b: int, s: int, budget: int | None = None) -> bool:
    """A non-adjacent pair is ``s``-slim when it is not ``s``-wide."""
    return len(max_anticomplete_paths(G, a, b, s, budget)) < s


def check_path_family(G: Graph, family: PathFamily) -> list[str]:
    """Independent checker for the path-family invariants; returns problems."""
    problems = []
    for i, p in enumerate(family.paths):
        if len(p) < 2 or p[0] != family.a or p[-1] != family.b:
            problems.append(f"path {i} does not run from a to b")
            continue
        if len(set(p)) != len(p):
            problems.append(f"path {i} repeats a vertex")
        for x in range(len(p)):
            for y in range(x + 1, len(p)):
                if G.has_edge(p[x], p[y]) != (y == x + 1):
                    problems.append(f"path {i} is not induced at ({p[x]}, {p[y]})")
    ints = family.interiors()
    for i, j in combinations(range(len(ints)), 2):
        if ints[i] & ints[j]:
            problems.append(f"interiors {i} and {j} intersect")
        elif any(G.neighbors(v) & ints[j] for v in ints[i]):
            problems.append(f"interiors {i} and {j} are not anticomplete")
    return problems


@dataclass
class SlimCheck:
    ok: bool
    stable_set: tuple[int, ...] = ()
    families: dict[tuple[int, int], PathFamily] = field(default_factory=dict)


def _stable_sets(G: Graph, size: int) -> Iterator[tuple[int, ...]]:
    verts = G.vertices

    def rec(start: int, current: list[int]):
        if len(current) == size:
            yield tuple(current)
            return
        for i in range(start, len(verts)):
            v = verts[i]
            if all(not G.has_edge(v, u) for u in current):
                current.append(v)
                yield from rec(i + 1, current)
                current.pop()

    yield from rec(0, [])


def check_tq_slim(G: Graph, t: int, s: int, budget: int | None = None) -> SlimCheck:
    """Is every stable set of size ``t`` guaranteed to contain an ``s``-slim pair?

    On failure the returned counterexample carries an ``s``-path family for
    every pair of the offending stable set.
    """
    if t < 2:
        raise GraphError("t must be at least 2")
    cache: dict[tuple[int, int], PathFamily] = {}

    def family(u: int, v: int) -> PathFamily:
        key = (u, v)
        if key not in cache:
            cache[key] = max_anticomplete_paths(G, u, v, s, budget)
        return cache[key]

    for S in _stable_sets(G, t):
        if all(len(family(u, v)) >= s for u, v in combinations(S, 2)):
            return SlimCheck(False, S, {(u, v): family(u, v) for u, v in combinations(S, 2)})
    return SlimCheck(True)
