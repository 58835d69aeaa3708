"""Separators for slim pairs and balanced separators in star-based graphs.

Every routine here takes a *decomposition provider*: a callable that maps an
induced subgraph ``H`` to a tree decomposition of ``H`` whose bags are
``F(H)``-based with measure at most ``r``.  Each answer is verified before use.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable

from .barriers import MineCertificate, MineabilityError, mineable_to_barrier, verify_mineable
from .bounds import BoundParams, sep_slim_bound
from .decomposition import (StarForest, TreeDecomposition, balanced_bag, is_balanced_separator,
                            normalize_weights, project_forest, verify_fr)
from .graph import Graph, GraphError, component_of, is_separator, min_separator
from .slimness import is_slim_pair

__all__ = [
    "Provider",
    "HypothesisViolated",
    "ProviderError",
    "DepthExceeded",
    "Trace",
    "basket",
    "MineSlimResult",
    "mineslim",
    "separate_slim_pair",
    "balanced_separator_slim",
]

Provider = Callable[[Graph], TreeDecomposition]


class HypothesisViolated(GraphError):
    """A precondition such as slimness of the pair does not hold."""


class ProviderError(GraphError):
    """The decomposition provider returned something that is not a valid
    star-based decomposition of the requested subgraph."""


class DepthExceeded(GraphError):
    pass


@dataclass
class Trace:
    """JSON-lines log of the recursion; one record per event."""

    records: list[dict] = field(default_factory=list)

    def add(self, **record) -> None:
        self.records.append(record)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records)

    @property
    def fallbacks(self) -> int:
        return sum(1 for r in self.records if r.get("fallback"))


def _provide(provider: Provider, H: Graph, F: StarForest, r: int) -> TreeDecomposition:
    td = provider(H)
    ok, problems = verify_fr(H, F, td, r)
    if not ok:
        raise ProviderError(f"provider output rejected: {problems[:3]}")
    return td


def _nonadjacent_pair(G: Graph, a: int, b: int) -> None:
    G.check_vertices((a, b))
    if a == b or G.has_edge(a, b):
        raise GraphError("the pair must consist of two distinct non-adjacent vertices")


def basket(G: Graph, td: TreeDecomposition, a: int, b: int, q: int,
           check_slim: bool = True, F: StarForest | None = None) -> tuple[int, ...]:
    """Fewer than ``q`` bags whose union meets the interior of every ``a``-``b`` path.

    Equivalently the union minus ``{a, b}`` separates ``a`` from ``b``.  Only
    the smallest number of bags is tried.  Among those hits the union with
    fewest vertices outside ``F`` wins, then the smallest union, then the
    lowest node indices.
    """
    _nonadjacent_pair(G, a, b)
    if q < 1:
        raise GraphError("q must be positive")
    if check_slim and not is_slim_pair(G, a, b, q):
        raise HypothesisViolated(f"({a}, {b}) is not {q}-slim")
    if b not in component_of(G, a):
        return ()
    forest = F.vertices if F is not None else frozenset()
    distinct: dict[frozenset[int], int] = {}
    for i, bag in enumerate(td.bags):
        distinct.setdefault(bag - {a, b}, i)
    nodes = sorted(distinct.items(), key=lambda kv: kv[1])
    for size in range(1, q):
        best = None
        for combo in combinations(nodes, size):
            union = frozenset().union(*(bag for bag, _ in combo))
            if b not in component_of(G, a, union):
                key = (len(union - forest), len(union), tuple(sorted(i for _, i in combo)))
                best = key if best is None else min(best, key)
        if best is not None:
            return best[2]
    raise HypothesisViolated(f"no {q - 1} bags meet every path between {a} and {b}")


@dataclass
class MineSlimResult:
    """Either ``D`` separates the pair (``certificate is None``) or the pair is
    mineable in ``G - D`` as witnessed by ``certificate``."""

    D: frozenset[int]
    certificate: MineCertificate | None
    rounds: int

    @property
    def separated(self) -> bool:
        return self.certificate is None


def mineslim(G: Graph, F: StarForest, r: int, q: int, x: int, a: int, b: int,
             provider: Provider, check_slim: bool = True) -> MineSlimResult:
    """Peel separators off a slim pair round by round.

    In each round a decomposition of the current graph is taken and a basket
    of its bags is split into non-forest vertices (deleted for good), star
    centers (the next core) and star leaves (the next separator).  The loop
    stops after ``x`` rounds or as soon as the deletions separate the pair.
    """
    _nonadjacent_pair(G, a, b)
    if x < 1:
        raise GraphError("x must be positive")
    if check_slim and not is_slim_pair(G, a, b, q):
        raise HypothesisViolated(f"({a}, {b}) is not {q}-slim")
    if b not in component_of(G, a):
        return MineSlimResult(frozenset(), None, 0)
    C: set[int] = set()
    cores: list[frozenset[int]] = []
    seps: list[frozenset[int]] = []
    removed: set[int] = set()
    for i in range(x):
        Gi = G.remove(removed)
        Fi = project_forest(F, Gi.vertices)
        td = _provide(provider, Gi, Fi, r)
        chosen = basket(Gi, td, a, b, q, check_slim=False, F=Fi)
        union = frozenset().union(*(td.bags[j] for j in chosen)) - {a, b}
        centers, leaves = Fi.center_set, Fi.leaf_set
        owner = {l: c for c, ls in zip(Fi.centers, Fi.leaves) for l in ls}
        Y = frozenset(v for v in union if v in centers)
        # leaves hanging from a or b cannot be dominated by the core
        X = frozenset(v for v in union if v in leaves and owner[v] in Y)
        C |= union - Y - X
        cores.append(Y)
        seps.append(X)
        removed = C | set().union(*cores)
        if b not in component_of(G, a, removed):
            D = frozenset(removed)
            if not is_separator(G, D, a, b):
                raise GraphError("internal error: mined deletion set does not separate")
            return MineSlimResult(D, None, i + 1)
    D = frozenset(C)
    cert = MineCertificate(tuple(cores), tuple(seps), x, r * (q - 1), 1, 1)
    ok, why = verify_mineable(G.remove(D), a, b, cert)
    if not ok:
        raise GraphError(f"mined certificate fails verification: {why}")
    return MineSlimResult(D, cert, x)


def _fallback(G: Graph, S: frozenset[int], a: int, b: int) -> frozenset[int]:
    return S | min_separator(G.remove(S), a, b)


def separate_slim_pair(G: Graph, a: int, b: int, params: BoundParams, F: StarForest,
                       provider: Provider, depth_guard: int = 32, trace: Trace | None = None,
                       _depth: int = 0) -> frozenset[int]:
    """Separator for a ``q``-slim pair built from a good barrier.

    Small graphs (at most ten vertices) use a minimum separator.  Otherwise
    the pair is mined; a separating deletion set is returned as is, and a
    certificate is turned into a barrier ``(X, Y, Z, C)`` in ``G - M``.  Each
    slim pair of ``C`` is then separated inside the barrier body, recursively
    when that body is smaller than ``G``.  The union of ``M``, ``C`` and these
    separators is returned.  Whenever a guarantee fails (the graph is not slim
    enough, or the certificate is too short) a minimum separator of what is
    left completes the answer and the trace records a fallback.
    """
    _nonadjacent_pair(G, a, b)
    trace = trace if trace is not None else Trace()
    if _depth > depth_guard:
        raise DepthExceeded(f"recursion deeper than {depth_guard}")
    node = {"depth": _depth, "n": G.n, "pair": [a, b]}
    if _depth == 0 and not is_slim_pair(G, a, b, params.q):
        raise HypothesisViolated(f"({a}, {b}) is not {params.q}-slim")
    if b not in component_of(G, a):
        trace.add(**node, kind="disconnected", separator=0)
        return frozenset()
    if G.n <= 10:
        S = min_separator(G, a, b)
        trace.add(**node, kind="base", separator=len(S))
        return S
    try:
        mined = mineslim(G, F, params.r, params.q, params.x, a, b, provider, check_slim=False)
    except HypothesisViolated as exc:
        S = min_separator(G, a, b)
        trace.add(**node, kind="falsified", reason=str(exc), separator=len(S), fallback=True)
        return S
    if mined.separated:
        trace.add(**node, kind="mined-separator", deleted=len(mined.D), separator=len(mined.D),
                  rounds=mined.rounds)
        return mined.D
    D = mined.D
    H = G.remove(D)
    try:
        good = mineable_to_barrier(H, a, b, mined.certificate, params.p, params.phi)
    except MineabilityError as exc:
        S = _fallback(G, D, a, b)
        trace.add(**node, kind="barrier-failed", reason=str(exc), deleted=len(D),
                  separator=len(S), fallback=True)
        return S
    B = good.barrier
    M = D | good.M
    inner: set[int] = set()
    pairs = 0
    for u, v in combinations(sorted(B.C), 2):
        if G.has_edge(u, v):
            continue
        Huv = G.subgraph(B.body | {u, v})
        if v not in component_of(Huv, u) or not is_slim_pair(Huv, u, v, params.q):
            continue
        pairs += 1
        if Huv.n < G.n:
            inner |= separate_slim_pair(Huv, u, v, params, F, provider, depth_guard, trace, _depth + 1)
        else:
            inner |= min_separator(Huv, u, v)
    S = frozenset(M | B.C | inner)
    record = dict(node, kind="barrier", deleted=len(M), body=len(B.body), cores=len(B.C),
                  slim_pairs=pairs, inner=len(inner),
                  bound=float(sep_slim_bound(max(G.n, 2), max(params.r, 1))))
    if not is_separator(G, S, a, b):
        S = _fallback(G, S, a, b)
        record["fallback"] = True
    record["separator"] = len(S)
    trace.add(**record)
    return S


def balanced_separator_slim(G: Graph, w: dict | None, F: StarForest, params: BoundParams,
                            provider: Provider, trace: Trace | None = None) -> frozenset[int]:
    """Half-balanced separator from ``p`` rounds of balanced bags.

    Round ``i`` takes a balanced bag of a decomposition of the current graph,
    keeps its non-leaf part ``X_i``, deletes it and rescales the weights.
    Slim pairs across different rounds are then separated in ``G`` and all of
    it is united.  If the result is not balanced (the slimness hypothesis
    failed) the first balanced bag is added and the trace says so.
    """
    trace = trace if trace is not None else Trace()
    if G.n == 0:
        return frozenset()
    weights = normalize_weights(G, w)
    wi = dict(weights)
    Gi = G
    rounds: list[frozenset[int]] = []
    first_bag: frozenset[int] | None = None
    for i in range(params.p):
        Fi = project_forest(F, Gi.vertices)
        td = _provide(provider, Gi, Fi, params.r)
        bag = td.bags[balanced_bag(Gi, td, wi)]
        if first_bag is None:
            first_bag = bag
        Xi = bag - Fi.leaf_set
        rounds.append(Xi)
        mass = sum(wi.get(v, 0) for v in Xi)
        if mass >= 1:
            trace.add(kind="balanced-round", round=i + 1, size=len(Xi), early=True)
            break
        Gi = Gi.remove(Xi)
        if Gi.n == 0:
            break
        wi = {v: wi.get(v, 0) / (1 - mass) for v in Gi.vertices}
        trace.add(kind="balanced-round", round=i + 1, size=len(Xi), mass=float(mass))
    X = set().union(*rounds)
    pairs = 0
    for i, j in combinations(range(len(rounds)), 2):
        for v in sorted(rounds[i]):
            for u in sorted(rounds[j]):
                if u == v or G.has_edge(u, v) or u in rounds[i] or v in rounds[j]:
                    continue
                if not is_slim_pair(G, v, u, params.q):
                    continue
                pairs += 1
                X |= separate_slim_pair(G, v, u, params, F, provider, trace=trace)
    S = frozenset(X)
    record = {"kind": "balanced", "rounds": len(rounds), "slim_pairs": pairs}
    if not is_balanced_separator(G, weights, S, Fraction(1, 2)):
        S = S | first_bag
        record["fallback"] = True
    assert is_balanced_separator(G, weights, S, Fraction(1, 2))
    record["separator"] = len(S)
    trace.add(**record)
    return S
