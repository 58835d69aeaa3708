"""Star colourings, star-forest contraction and the end-to-end treewidth pipeline."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .bounds import BoundParams, bound_r_sequence
from .decomposition import (SeparatorProviderError, StarForest, TreeDecomposition, bag_provider,
                            exact_treewidth, heuristic_decomposition, is_balanced_separator,
                            project_forest,
                            td_from_balanced_separators, verify_fr, verify_td)
from .graph import Graph, GraphError, components
from .minors import MinorModel, class_membership, contract_connected_sets, verify_model
from .separators import Trace, balanced_separator_slim

__all__ = [
    "StarColoring",
    "star_coloring_greedy",
    "verify_star_coloring",
    "star_chromatic_number",
    "EdgePartition",
    "edge_partition",
    "dimension",
    "low_dimension_degree_ok",
    "Contraction",
    "contract_star_forest",
    "lift_decomposition",
    "contraction_provider",
    "PipelineResult",
    "MembershipRefuted",
    "treewidth_bound_pipeline",
]


@dataclass(frozen=True)
class StarColoring:
    colors: dict[int, int]
    k: int

    @classmethod
    def of(cls, colors: dict[int, int]) -> "StarColoring":
        return cls(dict(colors), len(set(colors.values())))


def _bicolored_p4(G: Graph, colors: dict[int, int], v: int) -> tuple[int, ...] | None:
    """A path on four coloured vertices through ``v`` using exactly two colours."""
    col = colors.get
    cv = col(v)
    nb = [u for u in sorted(G.neighbors(v)) if col(u) is not None and col(u) != cv]
    for u in nb:
        cu = col(u)
        # v at an end: v u w x
        for w in sorted(G.neighbors(u)):
            if w != v and col(w) == cv:
                for x in sorted(G.neighbors(w)):
                    if x not in (u, v) and col(x) == cu:
                        return (v, u, w, x)
        # v second: u v w x
        for w in nb:
            if w != u and col(w) == cu:
                for x in sorted(G.neighbors(w)):
                    if x not in (u, v) and col(x) == cv:
                        return (u, v, w, x)
    return None


def _conflict(G: Graph, colors: dict[int, int], v: int) -> tuple[int, ...] | None:
    for u in sorted(G.neighbors(v)):
        if colors.get(u) == colors[v]:
            return (v, u)
    return _bicolored_p4(G, colors, v)


def star_coloring_greedy(G: Graph) -> StarColoring:
    """Colour vertices by decreasing degree with the least colour creating no
    monochromatic edge and no two-coloured path on four vertices."""
    colors: dict[int, int] = {}
    for v in sorted(G.vertices, key=lambda u: (-G.degree(u), u)):
        c = 0
        while True:
            colors[v] = c
            if _conflict(G, colors, v) is None:
                break
            c += 1
    return StarColoring.of(colors)


def verify_star_coloring(G: Graph, coloring: StarColoring | dict[int, int]) -> tuple[bool, tuple[int, ...] | None]:
    """``(True, None)`` or ``(False, witness)`` where the witness is a monochromatic
    edge or a two-coloured path on four vertices."""
    colors = coloring.colors if isinstance(coloring, StarColoring) else coloring
    if set(colors) != set(G.vertices):
        raise GraphError("colouring must cover exactly the vertices")
    for u, v in G.edges():
        if colors[u] == colors[v]:
            return False, (u, v)
    for v in G.vertices:
        witness = _bicolored_p4(G, colors, v)
        if witness is not None:
            return False, witness
    return True, None


def star_chromatic_number(G: Graph, limit: int = 9) -> int:
    """Least number of colours of a star colouring, by exhaustive backtracking."""
    if G.n > limit:
        raise GraphError(f"brute force limited to {limit} vertices")
    order = sorted(G.vertices, key=lambda u: (-G.degree(u), u))

    def extend(i: int, colors: dict[int, int], k: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        # colours are used in order of first appearance to skip symmetric branches
        for c in range(min(k, max(colors.values(), default=-1) + 2)):
            colors[v] = c
            if _conflict(G, colors, v) is None and extend(i + 1, colors, k):
                return True
            del colors[v]
        return False

    k = 1 if G.n else 0
    while G.n and not extend(0, {}, k):
        k += 1
    return k


@dataclass(frozen=True)
class EdgePartition:
    classes: dict[tuple[int, int], frozenset[tuple[int, int]]]
    forests: dict[tuple[int, int], StarForest]

    def covered(self) -> frozenset[tuple[int, int]]:
        return frozenset().union(*self.classes.values()) if self.classes else frozenset()


def edge_partition(G: Graph, coloring: StarColoring) -> EdgePartition:
    ok, witness = verify_star_coloring(G, coloring)
    if not ok:
        raise GraphError(f"not a star colouring, witness {witness}")
    colors = coloring.colors
    classes: dict[tuple[int, int], set[tuple[int, int]]] = {}
    for u, v in G.edges():
        key = tuple(sorted((colors[u], colors[v])))
        classes.setdefault(key, set()).add((u, v))
    forests = {}
    for key, edges in classes.items():
        touched = {x for e in edges for x in e}
        comps = [D for D in components(G.subgraph(touched)) if len(D) > 1]
        forests[key] = StarForest.from_stars(G, comps)
    return EdgePartition({k: frozenset(v) for k, v in sorted(classes.items())},
                         dict(sorted(forests.items())))


def _active(G: Graph, edges: frozenset[tuple[int, int]]) -> bool:
    load: dict[int, int] = {}
    for e in edges:
        for v in e:
            load[v] = load.get(v, 0) + 1
    return any(k > 3 for k in load.values())


def dimension(G: Graph, partition: EdgePartition) -> tuple[int, list[tuple[int, int]]]:
    """Number of colour pairs whose class has a vertex on more than three of its edges."""
    active = sorted(k for k, edges in partition.classes.items() if _active(G, edges))
    return len(active), active


def low_dimension_degree_ok(G: Graph, coloring: StarColoring, partition: EdgePartition) -> bool:
    """Dimension zero implies maximum degree at most ``3 k**2``."""
    dim, _ = dimension(G, partition)
    max_deg = max((G.degree(v) for v in G.vertices), default=0)
    return dim > 0 or max_deg <= 3 * coloring.k ** 2


# -- contraction -----------------------------------------------------------

@dataclass(frozen=True)
class Contraction:
    graph: Graph
    forest: StarForest
    preimage: dict[int, frozenset[int]]


def contract_star_forest(G: Graph, F: StarForest) -> Contraction:
    """Contract every star of ``F`` (restricted to ``G``) into its smallest vertex."""
    Fg = project_forest(F, G.vertices)
    H, rep = contract_connected_sets(G, Fg.stars())
    pre: dict[int, set[int]] = {}
    for v, r in rep.items():
        pre.setdefault(r, set()).add(v)
    return Contraction(H, Fg, {r: frozenset(s) for r, s in sorted(pre.items())})


def lift_decomposition(G: Graph, contraction: Contraction, td: TreeDecomposition,
                       star_bags: bool = False) -> TreeDecomposition:
    """Replace each contracted vertex in every bag by its star.

    With ``star_bags`` every star also gets a bag of its own, hung off the
    first bag holding it; that keeps the lift valid and exposes stars that
    are cuts on their own.
    """
    ok, problems = verify_td(contraction.graph, td)
    if not ok:
        raise GraphError(f"decomposition of the contracted graph is invalid: {problems[:3]}")
    bags = [frozenset().union(*(contraction.preimage[v] for v in bag)) if bag else frozenset()
            for bag in td.bags]
    edges = list(td.edges)
    if star_bags:
        for v, pre in contraction.preimage.items():
            if len(pre) > 1:
                host = next(i for i, bag in enumerate(td.bags) if v in bag)
                edges.append((host, len(bags)))
                bags.append(pre)
    return TreeDecomposition(tuple(bags), tuple(edges))


def _decompose(G: Graph, exact_cap: int) -> TreeDecomposition:
    if G.n <= exact_cap:
        return exact_treewidth(G, cap=exact_cap)[1]
    return heuristic_decomposition(G)


def contraction_provider(F: StarForest, exact_cap: int = 12):
    """Provider of ``F``-based decompositions: contract, decompose, lift.

    Each lifted bag has measure equal to the size of its source bag; every
    star also gets a bag of its own.
    """

    def provide(H: Graph) -> TreeDecomposition:
        con = contract_star_forest(H, F)
        return lift_decomposition(H, con, _decompose(con.graph, exact_cap), star_bags=True)

    return provide


# -- pipeline --------------------------------------------------------------

class MembershipRefuted(GraphError):
    def __init__(self, model: MinorModel, pattern: str):
        super().__init__(f"graph contains {pattern} as an induced minor")
        self.model = model
        self.pattern = pattern


@dataclass
class PipelineResult:
    td: TreeDecomposition
    reported_width: int
    theoretical_bound: object
    trace: list[dict] = field(default_factory=list)

    def trace_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.trace)


def _separator_provider(F: StarForest, params: BoundParams, r: int, exact_cap: int,
                        log: list[dict]):
    fr = contraction_provider(F, exact_cap)
    backup = bag_provider(lambda H: _decompose(H, exact_cap))

    def provide(H: Graph, w) -> frozenset[int]:
        sub_trace = Trace()
        try:
            raw = balanced_separator_slim(H, w, F, replace(params, r=r), fr, sub_trace)
            S = set(raw)
            for v in sorted(raw, reverse=True):
                if is_balanced_separator(H, w, S - {v}):
                    S.discard(v)
            S = frozenset(S)
            entry = {"n": H.n, "route": "slim", "raw": len(raw), "separator": len(S),
                     "fallbacks": sub_trace.fallbacks}
        except GraphError as exc:
            S = backup(H, w)
            entry = {"n": H.n, "route": "bag", "separator": len(S), "reason": str(exc), "fallback": True}
        log.append(entry)
        return S

    return provide


def treewidth_bound_pipeline(G: Graph, t: int, params: BoundParams, budget: int = 200_000,
                             exact_cap: int = 12, check_membership: bool = True) -> PipelineResult:
    """Decompose ``G`` by recursing on the colour-pair dimension.

    Dimension zero is decomposed directly.  Otherwise the lexicographically
    first active pair's star forest is contracted, the smaller graph is
    decomposed recursively and lifted into a star-based decomposition, and
    the final decomposition is assembled from balanced separators computed
    with that lift.  The trace has one record per level.
    """
    if check_membership:
        member = class_membership(G, t, budget)
        if member.status == "not_in_Ct":
            ok, problems = verify_model(G, member.model)
            assert ok, problems
            raise MembershipRefuted(member.model, member.pattern_name)
    trace: list[dict] = []
    td = _pipeline_level(G, params, exact_cap, trace, 0)
    ok, problems = verify_td(G, td)
    if not ok:
        raise GraphError(f"pipeline produced an invalid decomposition: {problems[:3]}")
    k = trace[0]["colors"] if trace else 0
    bound = None
    if G.n >= 2:
        seq = bound_r_sequence(G.n, params, max(0, min(trace[0]["dimension"], k * k)))
        bound = seq[trace[0]["dimension"]] if trace[0]["dimension"] < len(seq) else seq[-1]
    return PipelineResult(td, td.width, bound, trace)


def _pipeline_level(G: Graph, params: BoundParams, exact_cap: int, trace: list[dict], depth: int) -> TreeDecomposition:
    coloring = star_coloring_greedy(G)
    partition = edge_partition(G, coloring)
    dim, active = dimension(G, partition)
    record: dict = {"depth": depth, "n": G.n, "m": G.m, "colors": coloring.k, "dimension": dim}
    trace.append(record)
    if dim == 0:
        td = _decompose(G, exact_cap)
        record.update(route="direct", degree_ok=low_dimension_degree_ok(G, coloring, partition),
                      width=td.width)
        return td
    pair = active[0]
    F = partition.forests[pair]
    con = contract_star_forest(G, F)
    # a contracted star keeps its center's colour
    center_of = {min(s): c for s, c in zip(con.forest.stars(), con.forest.centers)}
    inherited = {v: coloring.colors[center_of.get(v, v)] for v in con.graph.vertices}
    leftover = [e for e in con.graph.edges()
                if tuple(sorted((inherited[e[0]], inherited[e[1]]))) == pair]
    record.update(route="contract", pair=list(pair), contracted_n=con.graph.n,
                  pair_cleared=not leftover)
    inner = _pipeline_level(con.graph, params, exact_cap, trace, depth + 1)
    lifted = lift_decomposition(G, con, inner)
    r = max(1, inner.width + 1)
    ok, problems = verify_fr(G, F, lifted, r)
    if not ok:
        raise GraphError(f"lifted decomposition is not star-based: {problems[:3]}")
    log: list[dict] = []
    provider = _separator_provider(F, params, r, exact_cap, log)
    td = _assemble(G, provider, lifted, log)
    record.update(lifted_r=r, separator_calls=len(log),
                  separator_fallbacks=sum(1 for e in log if e.get("fallback")),
                  width=td.width)
    return td


def _assemble(G: Graph, provider, lifted: TreeDecomposition, log: list[dict]) -> TreeDecomposition:
    """Balanced-separator construction with ``d`` raised until every answer fits."""
    cache: dict[tuple, frozenset[int]] = {}

    def cached(H: Graph, w) -> frozenset[int]:
        key = (H.vertices, tuple(sorted(w.items())))
        if key not in cache:
            cache[key] = provider(H, w)
        return cache[key]

    d = 1
    while True:
        try:
            return td_from_balanced_separators(G, cached, Fraction(1, 2), d)
        except SeparatorProviderError as exc:
            last = exc.transcript[-1]
            size = len(last["separator"])
            if size <= d:
                raise
            d = size
