"""Immutable simple graphs and the basic primitives everything else uses.

Vertices are non-negative integers.  A graph built by :func:`Graph.from_edges`
has vertices ``0..n-1``; graphs obtained with :meth:`Graph.subgraph` or
:meth:`Graph.remove` keep the labels of their host, which lets the rest of the
library talk about "the same vertex" across a chain of induced subgraphs.
"""

from __future__ import annotations

import random
from collections import deque
from typing import Iterable, Iterator, Mapping

__all__ = [
    "Graph",
    "GraphError",
    "induced_subgraph",
    "components",
    "is_anticomplete",
    "neighborhood",
    "second_neighborhood",
    "is_separator",
    "min_separator",
    "generate",
    "complete",
    "complete_bipartite",
    "path",
    "cycle",
    "hex_grid",
    "random_gnm",
    "caterpillar",
    "parse_edge_list",
    "format_edge_list",
]


class GraphError(ValueError):
    """Raised for invalid vertices, malformed input or violated preconditions."""


class Graph:
    """A finite simple undirected graph.  Instances are never mutated."""

    __slots__ = ("_adj", "_vertices")

    def __init__(self, adjacency: Mapping[int, Iterable[int]]):
        adj: dict[int, frozenset[int]] = {}
        for v, nbrs in adjacency.items():
            adj[int(v)] = frozenset(int(u) for u in nbrs)
        for v, nbrs in adj.items():
            if v < 0:
                raise GraphError(f"negative vertex {v}")
            if v in nbrs:
                raise GraphError(f"self-loop at {v}")
            for u in nbrs:
                if u not in adj or v not in adj[u]:
                    raise GraphError(f"asymmetric adjacency between {v} and {u}")
        self._adj = adj
        self._vertices = tuple(sorted(adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        adj: dict[int, set[int]] = {v: set() for v in range(n)}
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            adj[u].add(v)
            adj[v].add(u)
        return cls(adj)

    # -- basic queries -------------------------------------------------
    @property
    def n(self) -> int:
        return len(self._vertices)

    @property
    def m(self) -> int:
        return sum(len(s) for s in self._adj.values()) // 2

    @property
    def vertices(self) -> tuple[int, ...]:
        return self._vertices

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def __iter__(self) -> Iterator[int]:
        return iter(self._vertices)

    def __len__(self) -> int:
        return len(self._vertices)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self._adj == other._adj

    def __hash__(self) -> int:
        return hash(frozenset(self._adj.items()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def neighbors(self, v: int) -> frozenset[int]:
        try:
            return self._adj[v]
        except KeyError:
            raise GraphError(f"vertex {v} not in graph") from None

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adj.get(u, ())

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in self._vertices for v in sorted(self._adj[u]) if u < v]

    def adjacency(self) -> dict[int, frozenset[int]]:
        return dict(self._adj)

    def check_vertices(self, X: Iterable[int]) -> frozenset[int]:
        X = frozenset(X)
        for v in sorted(X):
            if v not in self._adj:
                raise GraphError(f"vertex {v} not in graph")
        return X

    # -- derived graphs ------------------------------------------------
    def subgraph(self, X: Iterable[int]) -> "Graph":
        """Induced subgraph on ``X``, keeping vertex labels."""
        X = self.check_vertices(X)
        return Graph({v: self._adj[v] & X for v in X})

    def remove(self, X: Iterable[int]) -> "Graph":
        """``G \\ X``; vertices of ``X`` not in the graph are ignored."""
        X = frozenset(X)
        keep = [v for v in self._vertices if v not in X]
        ks = frozenset(keep)
        return Graph({v: self._adj[v] & ks for v in keep})

    def add_edges(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj = {v: set(s) for v, s in self._adj.items()}
        for u, v in edges:
            if u not in adj or v not in adj:
                raise GraphError(f"edge ({u}, {v}) uses unknown vertex")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            adj[u].add(v)
            adj[v].add(u)
        return Graph(adj)

    def relabeled(self) -> tuple["Graph", dict[int, int]]:
        """Copy on ``0..n-1`` (in sorted label order) plus the old->new map."""
        index = {v: i for i, v in enumerate(self._vertices)}
        g = Graph({index[v]: [index[u] for u in self._adj[v]] for v in self._vertices})
        return g, index


def induced_subgraph(G: Graph, X: Iterable[int]) -> tuple[Graph, dict[int, int]]:
    """``G[X]`` relabelled to ``0..|X|-1``, together with the old->new index map."""
    return G.subgraph(X).relabeled()


def components(G: Graph, removed: Iterable[int] = ()) -> list[frozenset[int]]:
    """Connected components of ``G \\ removed``, ordered by smallest vertex."""
    removed = frozenset(removed)
    seen: set[int] = set(removed)
    out = []
    for s in G.vertices:
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for u in G.neighbors(v):
                if u not in seen:
                    seen.add(u)
                    comp.append(u)
                    queue.append(u)
        out.append(frozenset(comp))
    return out


def component_of(G: Graph, v: int, removed: Iterable[int] = ()) -> frozenset[int]:
    removed = frozenset(removed)
    if v in removed:
        return frozenset()
    seen = {v}
    queue = deque([v])
    while queue:
        x = queue.popleft()
        for u in G.neighbors(x):
            if u not in seen and u not in removed:
                seen.add(u)
                queue.append(u)
    return frozenset(seen)


def is_connected_set(G: Graph, X: Iterable[int]) -> bool:
    X = frozenset(X)
    if not X:
        return False
    start = min(X)
    return component_of(G, start, G.check_vertices(set(G.vertices) - X)) == X


def is_anticomplete(G: Graph, X: Iterable[int], Y: Iterable[int]) -> bool:
    X, Y = frozenset(X), frozenset(Y)
    if X & Y:
        return False
    return all(not (G.neighbors(x) & Y) for x in X)


def neighborhood(G: Graph, X: Iterable[int]) -> frozenset[int]:
    """``N(X)``: vertices outside ``X`` with a neighbour in ``X``."""
    X = G.check_vertices(X)
    out: set[int] = set()
    for x in X:
        out |= G.neighbors(x)
    return frozenset(out - X)


def second_neighborhood(G: Graph, v: int) -> frozenset[int]:
    """Vertices at distance exactly two from ``v``."""
    first = G.neighbors(v)
    out: set[int] = set()
    for u in first:
        out |= G.neighbors(u)
    return frozenset(out - first - {v})


def _check_pair(G: Graph, a: int, b: int) -> None:
    G.check_vertices((a, b))
    if a == b:
        raise GraphError("a and b must be distinct")
    if G.has_edge(a, b):
        raise GraphError(f"{a} and {b} are adjacent; no separator exists")


def is_separator(G: Graph, S: Iterable[int], a: int, b: int) -> bool:
    """True iff no component of ``G \\ S`` contains both ``a`` and ``b``."""
    S = G.check_vertices(S)
    _check_pair(G, a, b)
    if a in S or b in S:
        raise GraphError("a separator must avoid a and b")
    return b not in component_of(G, a, S)


def min_separator(G: Graph, a: int, b: int) -> frozenset[int]:
    """A minimum ``a``-``b`` separator, via unit vertex capacities and Menger.

    Every vertex other than ``a``/``b`` is split into an in-node and an out-node
    joined by a capacity-one arc; edges become uncapacitated arcs.  After
    Edmonds-Karp terminates, the vertices whose in-node is reachable from ``a``
    in the residual network but whose out-node is not form a minimum cut.
    """
    _check_pair(G, a, b)
    big = G.n + 1
    cap: dict[tuple, dict[tuple, int]] = {}

    def arc(x, y, c):
        cap.setdefault(x, {})[y] = cap.setdefault(x, {}).get(y, 0) + c
        cap.setdefault(y, {}).setdefault(x, 0)

    for v in G.vertices:
        arc((v, 0), (v, 1), big if v in (a, b) else 1)
        for u in G.neighbors(v):
            arc((v, 1), (u, 0), big)
    source, sink = (a, 1), (b, 0)

    def reachable():
        parent = {source: None}
        queue = deque([source])
        while queue:
            x = queue.popleft()
            for y, c in cap[x].items():
                if c > 0 and y not in parent:
                    parent[y] = x
                    queue.append(y)
        return parent

    while True:
        parent = reachable()
        if sink not in parent:
            break
        y = sink
        while parent[y] is not None:
            x = parent[y]
            cap[x][y] -= 1
            cap[y][x] += 1
            y = x
    return frozenset(v for v in G.vertices if v not in (a, b)
                     and (v, 0) in parent and (v, 1) not in parent)


# -- generators -----------------------------------------------------------

def complete(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def complete_bipartite(s: int, t: int) -> Graph:
    return Graph.from_edges(s + t, [(i, s + j) for i in range(s) for j in range(t)])


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def hex_grid(t: int) -> Graph:
    """Hexagonal grid with ``t`` rows and ``t`` columns of hexagonal faces.

    Brick-wall embedding: ``t + 1`` horizontal rows of ``2t + 2`` vertices,
    consecutive vertices in a row joined, and rung ``(r, c)-(r+1, c)`` present
    when ``c + r`` is even.  The two degree-one corners (first vertex of the
    first row and the far end of the last row) are dropped, leaving
    ``2(t+1)^2 - 2`` vertices and ``3t^2 + 4t - 1`` edges; ``hex_grid(1)`` is C6.
    Vertices are numbered row-major.
    """
    if t < 1:
        raise GraphError("hex_grid needs t >= 1")
    width = 2 * t + 2
    cells = [(r, c) for r in range(t + 1) for c in range(width)]
    edges = set()
    for r, c in cells:
        if c + 1 < width:
            edges.add(((r, c), (r, c + 1)))
        if r + 1 <= t and (c + r) % 2 == 0:
            edges.add(((r, c), (r + 1, c)))
    degree = {v: 0 for v in cells}
    for u, v in edges:
        degree[u] += 1
        degree[v] += 1
    # drop pendant corners until none remain
    alive = set(cells)
    changed = True
    while changed:
        changed = False
        for v in sorted(alive):
            if degree[v] <= 1:
                alive.discard(v)
                for e in list(edges):
                    if v in e:
                        edges.discard(e)
                        for w in e:
                            degree[w] -= 1
                changed = True
    order = sorted(alive)
    index = {v: i for i, v in enumerate(order)}
    return Graph.from_edges(len(order), [(index[u], index[v]) for u, v in edges])


def random_gnm(n: int, m: int, seed: int) -> Graph:
    """Uniform random graph with ``n`` vertices and ``m`` edges."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if m > len(pairs):
        raise GraphError(f"at most {len(pairs)} edges on {n} vertices")
    rng = random.Random(seed)
    return Graph.from_edges(n, rng.sample(pairs, m))


def caterpillar(x: int) -> Graph:
    """Path ``a, x_1, ..., x_x, b`` with a pendant ``y_i`` on every ``x_i``.

    Labels: ``a = 0``, ``x_i = i``, ``y_i = x + i``, ``b = 2x + 1``.
    """
    if x < 1:
        raise GraphError("caterpillar needs x >= 1")
    b = 2 * x + 1
    spine = [0] + list(range(1, x + 1)) + [b]
    edges = list(zip(spine, spine[1:]))
    edges += [(i, x + i) for i in range(1, x + 1)]
    return Graph.from_edges(2 * x + 2, edges)


_KINDS = {
    "complete": lambda p: complete(p["n"]),
    "bipartite": lambda p: complete_bipartite(p["s"], p["t"]),
    "path": lambda p: path(p["n"]),
    "cycle": lambda p: cycle(p["n"]),
    "hex": lambda p: hex_grid(p["t"]),
    "random": lambda p: random_gnm(p["n"], p["m"], p["seed"]),
    "caterpillar": lambda p: caterpillar(p["x"]),
}


def generate(kind: str, **params) -> Graph:
    if kind not in _KINDS:
        raise GraphError(f"unknown graph kind {kind!r}; choose from {sorted(_KINDS)}")
    if kind == "random" and params.get("seed") is None:
        raise GraphError("random graphs need an explicit seed")
    for key, value in params.items():
        if key != "seed" and isinstance(value, int) and value < 0:
            raise GraphError(f"parameter {key} must be non-negative")
    try:
        return _KINDS[kind](params)
    except KeyError as exc:
        raise GraphError(f"missing parameter {exc.args[0]!r} for kind {kind!r}") from None


# -- edge-list format -----------------------------------------------------

def parse_edge_list(text: str) -> Graph:
    """Parse ``n m`` followed by ``m`` lines ``u v``; ``#`` starts a comment."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows:
        raise GraphError("empty edge list")
    lineno, header = rows[0]
    if len(header) != 2:
        raise GraphError(f"line {lineno}: header must be 'n m'")
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError:
        raise GraphError(f"line {lineno}: non-integer header") from None
    if len(rows) - 1 != m:
        raise GraphError(f"header announces {m} edges, found {len(rows) - 1}")
    edges = []
    for lineno, parts in rows[1:]:
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected 'u v'")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise GraphError(f"line {lineno}: non-integer vertex") from None
    g = Graph.from_edges(n, edges)
    if g.m != m:
        raise GraphError("duplicate edges in edge list")
    return g


def format_edge_list(G: Graph) -> str:
    if G.vertices != tuple(range(G.n)):
        G, _ = G.relabeled()
    lines = [f"{G.n} {G.m}"] + [f"{u} {v}" for u, v in G.edges()]
    return "\n".join(lines) + "\n"
