"""Tree decompositions, the exact treewidth oracle, star forests and balanced separators."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .graph import Graph, GraphError, components

__all__ = [
    "TreeDecomposition",
    "verify_td",
    "decomposition_from_order",
    "exact_treewidth",
    "heuristic_decomposition",
    "StarForest",
    "project_forest",
    "is_f_based",
    "f_measure",
    "verify_fr",
    "normalize_weights",
    "is_balanced_separator",
    "balanced_bag",
    "SeparatorProviderError",
    "td_from_balanced_separators",
    "forest_centroid",
    "bag_provider",
    "DEFAULT_EXACT_CAP",
]

DEFAULT_EXACT_CAP = 14


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags are indexed ``0..len(bags)-1``; ``edges`` join bag indices."""

    bags: tuple[frozenset[int], ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.bags]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj

    def to_pace(self, n: int) -> str:
        """PACE ``.td`` text; graph vertices ``v`` are written as ``v + 1``."""
        lines = [f"s td {len(self.bags)} {self.width + 1} {n}"]
        for i, bag in enumerate(self.bags):
            lines.append(" ".join(["b", str(i + 1)] + [str(v + 1) for v in sorted(bag)]))
        for i, j in self.edges:
            lines.append(f"{i + 1} {j + 1}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_pace(cls, text: str) -> "TreeDecomposition":
        bags: dict[int, frozenset[int]] = {}
        edges = []
        count = None
        for raw in text.splitlines():
            parts = raw.split()
            if not parts or parts[0] == "c":
                continue
            if parts[0] == "s":
                if len(parts) != 5 or parts[1] != "td":
                    raise GraphError("malformed PACE header")
                count = int(parts[2])
            elif parts[0] == "b":
                bags[int(parts[1]) - 1] = frozenset(int(v) - 1 for v in parts[2:])
            else:
                i, j = (int(x) - 1 for x in parts)
                edges.append((i, j))
        if count is None or sorted(bags) != list(range(count)):
            raise GraphError("PACE bags do not match the header")
        return cls(tuple(bags[i] for i in range(count)), tuple(edges))


def verify_td(G: Graph, td: TreeDecomposition) -> tuple[bool, list[str]]:
    """Check the tree shape, vertex and edge coverage, and connected occupancy."""
    problems = []
    k = len(td.bags)
    for i, j in td.edges:
        if not (0 <= i < k and 0 <= j < k) or i == j:
            return False, [f"bad tree edge ({i}, {j})"]
    adj = td.neighbors()
    if k and (len(set(map(frozenset, td.edges))) != k - 1 or _reach(adj, 0, lambda _: True) != set(range(k))):
        problems.append("decomposition graph is not a tree")
    if not k and G.n:
        problems.append("no bags for a non-empty graph")
    occupied: dict[int, list[int]] = {v: [] for v in G.vertices}
    for i, bag in enumerate(td.bags):
        for v in bag:
            if v not in occupied:
                problems.append(f"bag {i} contains non-vertex {v}")
            else:
                occupied[v].append(i)
    for v, nodes in occupied.items():
        if not nodes:
            problems.append(f"vertex {v} is in no bag")
        elif _reach(adj, nodes[0], lambda i, v=v: v in td.bags[i]) != set(nodes):
            problems.append(f"bags containing {v} are not connected")
    for u, v in G.edges():
        if not set(occupied[u]) & set(occupied[v]):
            problems.append(f"edge ({u}, {v}) is in no bag")
    return not problems, problems


def _reach(adj: list[list[int]], start: int, allowed) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        i = stack.pop()
        for j in adj[i]:
            if j not in seen and allowed(j):
                seen.add(j)
                stack.append(j)
    return seen


def decomposition_from_order(G: Graph, order: Sequence[int]) -> TreeDecomposition:
    """Decomposition induced by eliminating vertices in ``order``.

    Each vertex gets the bag of itself plus its later neighbours in the filled
    graph, hung below the earliest-eliminated of those neighbours.
    """
    if sorted(order) != sorted(G.vertices):
        raise GraphError("order must be a permutation of the vertices")
    pos = {v: i for i, v in enumerate(order)}
    adj = {v: set(G.neighbors(v)) for v in G.vertices}
    bags = []
    edges = []
    for v in order:
        later = adj[v]
        bags.append(frozenset(later | {v}))
        if later:
            edges.append((pos[v], pos[min(later, key=pos.__getitem__)]))
        for u in later:
            adj[u] |= later - {u}
            adj[u].discard(v)
    # the roots of the elimination forest are chained into one tree
    roots = [i for i, v in enumerate(order) if not any(e[0] == i for e in edges)]
    edges.extend(zip(roots, roots[1:]))
    return TreeDecomposition(tuple(bags), tuple(edges))


def exact_treewidth(G: Graph, cap: int = DEFAULT_EXACT_CAP) -> tuple[int, TreeDecomposition]:
    """Treewidth by dynamic programming over vertex subsets.

    ``best[S]`` is the least possible maximum of ``|Q(prefix, v)|`` over
    elimination orders of ``S``, where ``Q(S, v)`` is the set of vertices
    outside ``S + v`` reachable from ``v`` through ``S``.
    """
    if G.n > cap:
        raise GraphError(f"exact treewidth is capped at {cap} vertices, got {G.n}")
    if G.n == 0:
        return -1, TreeDecomposition((), ())
    H, index = G.relabeled()
    label = {i: v for v, i in index.items()}
    n = H.n
    nbr = [sum(1 << u for u in H.neighbors(v)) for v in range(n)]

    def q_size(S: int, v: int) -> int:
        seen = 1 << v
        out = 0
        stack = [v]
        while stack:
            u = stack.pop()
            new = nbr[u] & ~seen
            seen |= new
            out |= new & ~S
            inner = new & S
            while inner:
                low = inner & -inner
                stack.append(low.bit_length() - 1)
                inner ^= low
        return bin(out).count("1")

    full = (1 << n) - 1
    best = [0] * (1 << n)
    choice = [0] * (1 << n)
    best[0] = -1
    for S in range(1, full + 1):
        value, pick = n, -1
        rest = S
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            prev = S ^ low
            if best[prev] >= value:
                continue
            cand = max(best[prev], q_size(prev, v))
            if cand < value:
                value, pick = cand, v
        best[S], choice[S] = value, pick
    order = []
    S = full
    while S:
        v = choice[S]
        order.append(v)
        S ^= 1 << v
    order.reverse()
    td = decomposition_from_order(G, [label[v] for v in order])
    assert td.width == best[full], (td.width, best[full])
    return best[full], td


def heuristic_decomposition(G: Graph) -> TreeDecomposition:
    """Greedy min-fill elimination (ties by degree, then label)."""
    adj = {v: set(G.neighbors(v)) for v in G.vertices}
    alive = set(G.vertices)
    order = []

    def fill(v: int) -> int:
        nb = sorted(adj[v])
        return sum(1 for i, x in enumerate(nb) for y in nb[i + 1:] if y not in adj[x])

    while alive:
        v = min(alive, key=lambda v: (fill(v), len(adj[v]), v))
        order.append(v)
        alive.discard(v)
        for u in adj[v]:
            adj[u] |= adj[v] - {u}
            adj[u].discard(v)
        del adj[v]
    return decomposition_from_order(G, order)


# -- star forests ----------------------------------------------------------

@dataclass(frozen=True)
class StarForest:
    """Vertex-disjoint stars, each given by its center and its (non-empty) leaves."""

    centers: tuple[int, ...]
    leaves: tuple[frozenset[int], ...]

    @classmethod
    def empty(cls) -> "StarForest":
        return cls((), ())

    @classmethod
    def from_stars(cls, G: Graph, stars: Iterable[Iterable[int]]) -> "StarForest":
        """Build from vertex sets, taking the vertex adjacent to all others as
        center (the smaller one for a single edge)."""
        centers, leaves = [], []
        for star in stars:
            star = frozenset(star)
            if len(star) < 2:
                raise GraphError("a star needs at least two vertices")
            hubs = [v for v in sorted(star) if star - {v} <= G.neighbors(v)]
            if not hubs:
                raise GraphError(f"{sorted(star)} is not a star")
            centers.append(hubs[0])
            leaves.append(star - {hubs[0]})
        order = sorted(range(len(centers)), key=lambda i: centers[i])
        forest = cls(tuple(centers[i] for i in order), tuple(leaves[i] for i in order))
        problems = forest.check(G)
        if problems:
            raise GraphError("; ".join(problems))
        return forest

    def __len__(self) -> int:
        return len(self.centers)

    def stars(self) -> list[frozenset[int]]:
        return [l | {c} for c, l in zip(self.centers, self.leaves)]

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset().union(*self.stars()) if self.centers else frozenset()

    @property
    def center_set(self) -> frozenset[int]:
        return frozenset(self.centers)

    @property
    def leaf_set(self) -> frozenset[int]:
        return frozenset().union(*self.leaves) if self.leaves else frozenset()

    def star_index(self) -> dict[int, int]:
        return {v: i for i, s in enumerate(self.stars()) for v in s}

    def check(self, G: Graph) -> list[str]:
        """Problems with this forest as an induced star forest of ``G``."""
        problems = []
        seen: set[int] = set()
        for c, leaves in zip(self.centers, self.leaves):
            star = leaves | {c}
            if not leaves:
                problems.append(f"star at {c} has no leaves")
            if seen & star:
                problems.append(f"star at {c} overlaps another star")
            seen |= star
            missing = star - set(G.vertices)
            if missing:
                problems.append(f"star at {c} uses non-vertices {sorted(missing)}")
        if problems:
            return problems
        index = self.star_index()
        for u, v in G.edges():
            if u in index and v in index:
                i, j = index[u], index[v]
                if i != j:
                    problems.append(f"edge ({u}, {v}) joins two stars")
                elif self.centers[i] not in (u, v):
                    problems.append(f"edge ({u}, {v}) joins two leaves")
        for c, leaves in zip(self.centers, self.leaves):
            for l in leaves - G.neighbors(c):
                problems.append(f"leaf {l} is not adjacent to center {c}")
        return problems


def project_forest(F: StarForest, keep: Iterable[int]) -> StarForest:
    """Restrict ``F`` to ``keep``; a star survives only with its center and a leaf."""
    keep = frozenset(keep)
    centers, leaves = [], []
    for c, l in zip(F.centers, F.leaves):
        if c in keep and l & keep:
            centers.append(c)
            leaves.append(l & keep)
    return StarForest(tuple(centers), tuple(leaves))


def is_f_based(F: StarForest, X: Iterable[int]) -> bool:
    X = frozenset(X)
    return all(s <= X for s in F.stars() if s & X)


def f_measure(F: StarForest, X: Iterable[int]) -> int:
    """Stars touched by ``X`` plus vertices of ``X`` outside the forest."""
    X = frozenset(X)
    if not is_f_based(F, X):
        raise GraphError("set is not F-based")
    touched = sum(1 for s in F.stars() if s & X)
    return touched + len(X - F.vertices)


def verify_fr(G: Graph, F: StarForest, td: TreeDecomposition, r: int) -> tuple[bool, list[str]]:
    """``td`` decomposes ``G`` and every bag is ``F(G)``-based with measure at most ``r``."""
    ok, problems = verify_td(G, td)
    Fg = project_forest(F, G.vertices)
    for i, bag in enumerate(td.bags):
        if not is_f_based(Fg, bag):
            problems.append(f"bag {i} splits a star")
        elif f_measure(Fg, bag) > r:
            problems.append(f"bag {i} has measure {f_measure(Fg, bag)} > {r}")
    return not problems, problems


# -- balanced separators ---------------------------------------------------

Weights = Mapping[int, Fraction]


def normalize_weights(G: Graph, w: Mapping[int, float | Fraction] | None = None) -> dict[int, Fraction]:
    """Exact weights on ``V(G)`` summing to one (uniform when ``w`` is None)."""
    if w is None:
        w = {v: 1 for v in G.vertices}
    raw = {v: Fraction(w.get(v, 0)) for v in G.vertices}
    if any(x < 0 for x in raw.values()):
        raise GraphError("weights must be non-negative")
    total = sum(raw.values())
    if total == 0:
        raise GraphError("weights sum to zero")
    return {v: x / total for v, x in raw.items()}


def is_balanced_separator(G: Graph, w: Weights, S: Iterable[int], c: Fraction = Fraction(1, 2)) -> bool:
    """Every component of ``G \\ S`` has weight at most ``c`` (of a total of one)."""
    S = G.check_vertices(S)
    return all(sum(w.get(v, 0) for v in D) <= c for D in components(G, S))


def balanced_bag(G: Graph, td: TreeDecomposition, w: Weights, c: Fraction = Fraction(1, 2)) -> int:
    """Index of a bag that is a ``(w, c)``-balanced separator.

    Walk from bag 0 toward the subtree holding the heavy component until no
    heavy component is left.
    """
    if not td.bags:
        raise GraphError("empty decomposition")
    adj = td.neighbors()
    node, came_from = 0, None
    for _ in range(len(td.bags)):
        bag = td.bags[node]
        heavy = [D for D in components(G, bag) if sum(w.get(v, 0) for v in D) > c]
        if not heavy:
            return node
        target = min(heavy[0])
        nxt = None
        for nb in adj[node]:
            branch = _reach(adj, nb, lambda j, node=node: j != node)
            if any(target in td.bags[j] for j in branch):
                nxt = nb
                break
        if nxt is None or nxt == came_from:
            raise GraphError("decomposition does not cover the graph")
        node, came_from = nxt, node
    raise GraphError("balanced bag walk did not terminate")


class SeparatorProviderError(GraphError):
    def __init__(self, message: str, transcript: list[dict]):
        super().__init__(message)
        self.transcript = transcript


Provider = Callable[[Graph, Weights], Iterable[int]]


def td_from_balanced_separators(G: Graph, provider: Provider, c: Fraction | float = Fraction(1, 2),
                                d: int = 1) -> TreeDecomposition:
    """Build a tree decomposition from a balanced-separator oracle.

    Each call handles a vertex set ``U`` with boundary ``W`` (the vertices
    shared with the parent bag).  The provider separates ``G[U]`` for the
    weight spread evenly on ``W``; the bag is ``W`` plus the separator and
    every component ``D`` recurses on ``D`` plus its attachments.  Parts of at
    most ``d/(1-c) + 1`` vertices become a single bag.  Every provider answer
    is checked for size and balance; a bad answer aborts with the transcript.
    """
    c = Fraction(c).limit_denominator(10**6)
    if not (Fraction(1, 2) <= c < 1):
        raise GraphError("c must lie in [1/2, 1)")
    if d < 0:
        raise GraphError("d must be non-negative")
    leaf_size = int(d / (1 - c)) + 1
    bags: list[frozenset[int]] = []
    edges: list[tuple[int, int]] = []
    transcript: list[dict] = []

    def build(U: frozenset[int], W: frozenset[int]) -> int:
        node = len(bags)
        if len(U) <= leaf_size:
            bags.append(U)
            return node
        if not W:
            W = frozenset([min(U)])
        sub = G.subgraph(U)
        w = {v: Fraction(1, len(W)) for v in W}
        S = frozenset(provider(sub, w))
        entry = {"size": len(U), "boundary": sorted(W), "separator": sorted(S)}
        transcript.append(entry)
        if not S <= U:
            raise SeparatorProviderError("separator leaves the subgraph", transcript)
        if len(S) > d:
            raise SeparatorProviderError(f"separator of size {len(S)} exceeds d={d}", transcript)
        if not is_balanced_separator(sub, w, S, c):
            raise SeparatorProviderError("separator is not balanced", transcript)
        bags.append(W | S)
        for D in components(sub, S):
            attach = frozenset(u for v in D for u in sub.neighbors(v)) - D
            child_U = D | attach
            child_W = (W & D) | attach
            if child_U == U:
                if child_W <= W:
                    spare = sorted(U - W)
                    if not spare:
                        bags[node] = U
                        return node
                    child_W = W | {spare[0]}
                else:
                    child_W |= W
            edges.append((node, build(child_U, child_W)))
        return node

    if G.n:
        roots = [build(D, frozenset()) for D in components(G)]
        edges.extend(zip(roots, roots[1:]))
    return TreeDecomposition(tuple(bags), tuple(edges))


def forest_centroid(G: Graph, w: Weights) -> frozenset[int]:
    """Weighted centroid of a forest: empty if already balanced, else one vertex.

    Among the vertices of the heaviest tree that leave every component with
    at most half the weight, the one leaving the smallest largest component
    (by vertex count, then label) is returned.
    """
    comps = components(G)
    heavy = [D for D in comps if sum(w.get(v, 0) for v in D) > Fraction(1, 2)]
    if not heavy:
        return frozenset()
    tree = G.subgraph(heavy[0])
    if tree.m != tree.n - 1:
        raise GraphError("centroid provider needs a forest")
    best = None
    for v in tree.vertices:
        parts = components(tree, [v])
        if all(sum(w.get(u, 0) for u in D) <= Fraction(1, 2) for D in parts):
            key = (max((len(D) for D in parts), default=0), v)
            best = min(best, key) if best else key
    assert best is not None, "every tree has a weighted centroid"
    return frozenset([best[1]])


def bag_provider(decompose: Callable[[Graph], TreeDecomposition] = heuristic_decomposition,
                 c: Fraction = Fraction(1, 2)) -> Provider:
    """Provider answering with a balanced bag of ``decompose(G)``, pruned greedily.

    Vertices are dropped from the bag (largest label first) while it stays
    ``(w, c)``-balanced.
    """

    def provide(G: Graph, w: Weights) -> frozenset[int]:
        if G.n == 0:
            return frozenset()
        td = decompose(G)
        S = set(td.bags[balanced_bag(G, td, w, c)])
        for v in sorted(S, reverse=True):
            if is_balanced_separator(G, w, S - {v}, c):
                S.discard(v)
        return frozenset(S)

    return provide
