"""Barriers, mineable certificates, separator-count distances and barrier selection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .graph import Graph, GraphError, component_of, components, is_anticomplete, is_separator
from .slimness import BudgetExhausted

__all__ = [
    "Barrier",
    "BarrierCheck",
    "verify_barrier",
    "barrier_separates",
    "reduce_barrier",
    "MineCertificate",
    "verify_mineable",
    "DistanceOracle",
    "distance_layers",
    "check_distance_properties",
    "MinesToBarriers",
    "MineabilityError",
    "mines_to_barriers",
    "GoodBarrier",
    "select_good_barrier",
    "mineable_to_barrier",
    "caterpillar_certificate",
]


def _fs(xs: Iterable[int]) -> frozenset[int]:
    return frozenset(xs)


@dataclass(frozen=True)
class Barrier:
    X: frozenset[int]
    Y: frozenset[int]
    Z: frozenset[int]
    C: frozenset[int]
    t: int
    p: int

    @property
    def body(self) -> frozenset[int]:
        """``X | Y | Z``."""
        return self.X | self.Y | self.Z

    def to_json(self) -> dict:
        return {"X": sorted(self.X), "Y": sorted(self.Y), "Z": sorted(self.Z),
                "C": sorted(self.C), "t": self.t, "p": self.p}

    @classmethod
    def from_json(cls, data: dict) -> "Barrier":
        return cls(_fs(data["X"]), _fs(data["Y"]), _fs(data["Z"]), _fs(data["C"]),
                   int(data["t"]), int(data["p"]))


@dataclass(frozen=True)
class BarrierCheck:
    ok: bool
    condition: int | None = None
    message: str = ""
    witness: tuple[int, ...] = ()


def _check_disjoint(G: Graph, sets: Sequence[frozenset[int]]) -> None:
    for s in sets:
        G.check_vertices(s)
    total = sum(len(s) for s in sets)
    if len(frozenset().union(*sets)) != total:
        raise GraphError("barrier sets overlap")


class _Steps:
    def __init__(self, budget: int | None):
        self.left = budget

    def tick(self) -> None:
        if self.left is not None:
            self.left -= 1
            if self.left < 0:
                raise BudgetExhausted("barrier path enumeration budget exhausted")


def _tight_paths(G: Graph, X: frozenset[int], Z: frozenset[int], inner: frozenset[int],
                 steps: _Steps, stop=None) -> Iterator[tuple[int, ...]]:
    """Induced paths from ``X`` to ``Z`` whose interior lies in ``inner``.

    ``stop(path)`` returning True cuts the branch below ``path``.
    """
    for x in sorted(X):
        for z in sorted(G.neighbors(x) & Z):
            yield (x, z)
        for v in sorted(G.neighbors(x) & inner):
            yield from _grow(G, [x, v], set(G.neighbors(x)) | {x}, Z, inner, steps, stop)


def _grow(G, path, forbidden, Z, inner, steps, stop):
    steps.tick()
    if stop is not None and stop(path):
        return
    last = path[-1]
    for z in sorted(G.neighbors(last) & Z):
        if z not in forbidden:
            yield tuple(path) + (z,)
    # prune when no vertex of Z is reachable any more
    blocked = forbidden | {last}
    seen, stack, hit = {last}, [last], False
    while stack and not hit:
        u = stack.pop()
        for y in G.neighbors(u):
            if y in seen or y in blocked:
                continue
            if y in Z:
                hit = True
                break
            if y in inner:
                seen.add(y)
                stack.append(y)
    if not hit:
        return
    nxt_forbidden = forbidden | G.neighbors(last) | {last}
    for u in sorted(G.neighbors(last) & inner):
        if u in forbidden:
            continue
        path.append(u)
        yield from _grow(G, path, nxt_forbidden, Z, inner, steps, stop)
        path.pop()


def verify_barrier(G: Graph, B: Barrier, budget: int | None = None) -> BarrierCheck:
    """Exhaustively check the three barrier conditions (component size first).

    Paths are induced.  Every X-Z path contains a sub-path with one end in X,
    the other in Z and no other vertex of X or Z, so both path conditions only
    need those tight paths: the first asks that their interiors lie in ``Y``,
    the second that their neighbourhood meets ``t`` components of ``C``.
    """
    _check_disjoint(G, [B.X, B.Y, B.Z, B.C])
    steps = _Steps(budget)
    comp_of: dict[int, int] = {}
    Cg = G.subgraph(B.C)
    for i, comp in enumerate(components(Cg)):
        if len(comp) > B.p:
            return BarrierCheck(False, 3, f"component of C has {len(comp)} > {B.p} vertices",
                                tuple(sorted(comp)))
        for v in comp:
            comp_of[v] = i

    outside = frozenset(G.vertices) - B.X - B.Y - B.Z - B.C
    free = frozenset(G.vertices) - B.X - B.Z - B.C
    risky: set[int] = set()
    for K in components(G.subgraph(free)):
        if K & outside and any(G.neighbors(v) & B.X for v in K) and any(G.neighbors(v) & B.Z for v in K):
            risky |= K
    if risky:
        for path in _tight_paths(G, B.X, B.Z, frozenset(risky), steps):
            if any(v in outside for v in path[1:-1]):
                return BarrierCheck(False, 1, "X-Z path with interior leaving Y", path)

    if B.t > 0:
        def touched(path):
            return {comp_of[u] for v in path for u in G.neighbors(v) if u in comp_of}

        def enough(path):
            return len(touched(path)) >= B.t

        for path in _tight_paths(G, B.X, B.Z, B.Y, steps, stop=enough):
            if not enough(path):
                return BarrierCheck(False, 2, f"X-Z path sees only {len(touched(path))} components of C",
                                    path)
    return BarrierCheck(True)


def barrier_separates(G: Graph, B: Barrier, u: int, v: int) -> bool:
    """Both ``X | C`` and ``Z | C`` separate ``u`` from ``v``."""
    inside = B.body | B.C
    if u in inside or v in inside:
        raise GraphError("u and v must lie outside the barrier")
    return is_separator(G, B.X | B.C, u, v) and is_separator(G, B.Z | B.C, u, v)


def reduce_barrier(G: Graph, B: Barrier, u: int, v: int, budget: int | None = None) -> Barrier:
    """Keep only the components of ``G[X | Y | Z]`` that meet both ``X`` and ``Z``."""
    check = verify_barrier(G, B, budget)
    if not check.ok:
        raise GraphError(f"input is not a barrier: {check.message}")
    if not barrier_separates(G, B, u, v):
        raise GraphError("input barrier does not separate the pair")
    keep: set[int] = set()
    for K in components(G.subgraph(B.body)):
        if K & B.X and K & B.Z:
            keep |= K
    return Barrier(B.X & keep, B.Y & keep, B.Z & keep, B.C, B.t, B.p)


# -- mineable certificates -------------------------------------------------

@dataclass(frozen=True)
class MineCertificate:
    Y_sets: tuple[frozenset[int], ...]
    X_sets: tuple[frozenset[int], ...]
    x: int
    y: int
    z: int
    p: int

    def to_json(self) -> dict:
        return {"Y_sets": [sorted(s) for s in self.Y_sets], "X_sets": [sorted(s) for s in self.X_sets],
                "x": self.x, "y": self.y, "z": self.z, "p": self.p}

    @classmethod
    def from_json(cls, data: dict) -> "MineCertificate":
        return cls(tuple(_fs(s) for s in data["Y_sets"]), tuple(_fs(s) for s in data["X_sets"]),
                   int(data["x"]), int(data["y"]), int(data["z"]), int(data["p"]))

    @property
    def cores(self) -> frozenset[int]:
        return frozenset().union(*self.Y_sets) if self.Y_sets else frozenset()


def verify_mineable(G: Graph, a: int, b: int, cert: MineCertificate) -> tuple[bool, str]:
    """Check every condition of the certificate; return ``(ok, first violation)``."""
    G.check_vertices((a, b))
    Ys, Xs = cert.Y_sets, cert.X_sets
    if len(Ys) != cert.x or len(Xs) != cert.x:
        return False, f"expected {cert.x} core and separator sets"
    for s in (*Ys, *Xs):
        G.check_vertices(s)
    used: set[int] = set()
    for i, Y in enumerate(Ys):
        if a in Y or b in Y:
            return False, f"Y_{i + 1} contains an end of the pair"
        if used & Y:
            return False, f"Y_{i + 1} is not disjoint from earlier cores"
        used |= Y
    removed: set[int] = set()
    for i, (Y, X) in enumerate(zip(Ys, Xs)):
        nbhd = {u for v in Y for u in G.neighbors(v)} - Y
        if not X or not X <= nbhd - {a, b}:
            return False, f"condition 1: X_{i + 1} is empty or not inside N(Y_{i + 1}) - {{a, b}}"
        H = G.remove(removed)
        if b in component_of(H, a, Y | X):
            return False, f"condition 1: Y_{i + 1} + X_{i + 1} does not separate a from b"
        removed |= Y
    if b not in component_of(G, a, removed):
        return False, "condition 2: a and b are separated by the union of the cores"
    for i in range(len(Ys)):
        for j in range(i + 1, len(Ys)):
            if not is_anticomplete(G, Ys[i], Ys[j]):
                return False, f"condition 3: Y_{i + 1} and Y_{j + 1} are not anticomplete"
    for i, Y in enumerate(Ys):
        comps = components(G.subgraph(Y))
        if len(comps) > cert.y:
            return False, f"condition 4: Y_{i + 1} has {len(comps)} > {cert.y} components"
        if any(len(c) > cert.p for c in comps):
            return False, f"condition 5: Y_{i + 1} has a component larger than {cert.p}"
    load: dict[int, int] = {}
    for Y, X in zip(Ys, Xs):
        for v in Y | X:
            load[v] = load.get(v, 0) + 1
    heavy = [v for v, k in load.items() if k > cert.z]
    if heavy:
        return False, f"condition 6: vertex {min(heavy)} lies in more than {cert.z} separators"
    return True, ""


def caterpillar_certificate(x: int) -> tuple[int, int, MineCertificate]:
    """``(a, b, cert)`` for the caterpillar fixture: cores are the pendants."""
    Ys = tuple(frozenset([x + i]) for i in range(1, x + 1))
    Xs = tuple(frozenset([i]) for i in range(1, x + 1))
    return 0, 2 * x + 1, MineCertificate(Ys, Xs, x, 1, 1, 1)


# -- distances -------------------------------------------------------------

@dataclass(frozen=True)
class DistanceOracle:
    """``dist[v]`` is the least number of separators ``X_i`` met by an ``a``-``v``
    path avoiding the cores (``math.inf`` when there is none)."""

    a: int
    dist: dict[int, float]
    layers: dict[int, frozenset[int]]
    masks: dict[int, int]
    cores: frozenset[int]

    def count(self, W: Iterable[int]) -> int:
        """Number of separators met by ``W``."""
        mask = 0
        for v in W:
            mask |= self.masks.get(v, 0)
        return bin(mask).count("1")

    def layer(self, j: int) -> frozenset[int]:
        return self.layers.get(j, frozenset())


def distance_layers(G: Graph, a: int, cert: MineCertificate, b: int | None = None,
                    verify: bool = True) -> DistanceOracle:
    """Exact separator-count distances from ``a`` in ``G`` minus the cores.

    The count of a path is the number of distinct separators it meets, so the
    search keeps, per vertex, the inclusion-minimal sets of separators met by
    walks from ``a`` and expands them in order of size.
    """
    if verify:
        if b is None:
            raise GraphError("verification needs the other end of the pair")
        ok, why = verify_mineable(G, a, b, cert)
        if not ok:
            raise GraphError(f"certificate rejected: {why}")
    cores = cert.cores
    masks: dict[int, int] = {}
    for i, X in enumerate(cert.X_sets):
        for v in X:
            masks[v] = masks.get(v, 0) | (1 << i)
    settled: dict[int, list[int]] = {}
    dist: dict[int, float] = {v: math.inf for v in G.vertices if v not in cores}
    buckets: dict[int, list[tuple[int, int]]] = {}
    start = masks.get(a, 0)
    buckets.setdefault(bin(start).count("1"), []).append((a, start))
    level = 0
    top = cert.x
    while level <= top:
        queue = buckets.pop(level, [])
        while queue:
            v, M = queue.pop()
            if any(old & ~M == 0 for old in settled.get(v, ())):
                continue
            settled.setdefault(v, []).append(M)
            dist[v] = min(dist[v], level)
            for u in G.neighbors(v):
                if u in cores:
                    continue
                M2 = M | masks.get(u, 0)
                k = bin(M2).count("1")
                if k == level:
                    queue.append((u, M2))
                else:
                    buckets.setdefault(k, []).append((u, M2))
        level += 1
    layers: dict[int, set[int]] = {}
    for v, m in masks.items():
        if v in dist and dist[v] != math.inf:
            layers.setdefault(int(dist[v]), set()).add(v)
    return DistanceOracle(a, dist, {j: frozenset(s) for j, s in layers.items()}, masks, cores)


def check_distance_properties(G: Graph, oracle: DistanceOracle, z: int) -> list[str]:
    """Start at zero, edge triangle inequality, and the bounded-step property."""
    problems = []
    if oracle.dist.get(oracle.a) != 0:
        problems.append("distance of the source is not zero")
    for u, v in G.edges():
        if u in oracle.cores or v in oracle.cores:
            continue
        for p, q in ((u, v), (v, u)):
            dp, dq = oracle.dist[p], oracle.dist[q]
            if dq > dp + oracle.count((p, q)):
                problems.append(f"triangle inequality fails on ({p}, {q})")
            if dp < dq and not (q in oracle.masks and dq <= dp + z):
                problems.append(f"step from {p} to {q} leaves the allowed layers")
    return problems


# -- mines to barriers -----------------------------------------------------

class MineabilityError(GraphError):
    """The certificate is too short for the requested number of barriers,
    or a construction guarantee failed (reported as a falsification)."""


@dataclass
class MinesToBarriers:
    C: frozenset[int]
    barriers: list[Barrier]
    indices: list[int]
    oracle: DistanceOracle
    size_cap: Fraction
    report: dict = field(default_factory=dict)


def barrier_count(x: int, z: int, t: int) -> int:
    return math.ceil(Fraction(99, 100) * Fraction(x, 4 * z + 2 * t))


def mines_to_barriers(G: Graph, a: int, b: int, cert: MineCertificate, t: int,
                      budget: int | None = None) -> MinesToBarriers:
    """Cut the separator-count layering into pairwise anticomplete barriers.

    Layer block ``j`` starts at count ``(j-1)(2z+t)+1`` and spans ``z+1``
    counts.  Barrier ``j`` runs from block ``j`` to block ``j+1``.  Every
    other barrier (``j = 1, 3, 5, ...``) is kept, then the oversized ones
    are dropped and the list is cut to the target count.
    """
    x, z = cert.x, cert.z
    w = barrier_count(x, z, t)
    pairs = x // (4 * z + 2 * t)
    if w < 1 or pairs < w:
        raise MineabilityError(f"insufficient mineability: x={x} gives {pairs} layer pairs, {w} required")
    oracle = distance_layers(G, a, cert, b)
    C = cert.cores
    step = 2 * z + t
    m = x // step
    lo = {j: (j - 1) * step + 1 for j in range(1, m + 2)}
    blocks = {j: frozenset().union(*(oracle.layer(k) for k in range(lo[j], lo[j] + z + 1)))
              for j in range(1, m + 2)}
    size_cap = Fraction(100 * G.n * (4 * z + 2 * t) ** 2, x)
    kept: list[Barrier] = []
    indices: list[int] = []
    dropped = 0
    for i in range(1, pairs + 1):
        j = 2 * i - 1
        W1, W2 = blocks[j], blocks[j + 1]
        L = frozenset(v for v, d in oracle.dist.items()
                      if lo[j] <= d < lo[j + 1] and v not in W1 and v not in W2)
        B = Barrier(W1, L, W2, C, t, cert.p)
        if len(B.body) > size_cap:
            dropped += 1
            continue
        kept.append(B)
        indices.append(j)
    if len(kept) < w:
        raise MineabilityError(f"only {len(kept)} barriers survive the size filter, {w} required")
    kept, indices = kept[:w], indices[:w]
    for j, B in zip(indices, kept):
        check = verify_barrier(G, B, budget)
        if not check.ok:
            raise MineabilityError(f"layer barrier {j} fails condition {check.condition}: {check.message}")
        if not barrier_separates(G, B, a, b):
            raise MineabilityError(f"layer barrier {j} does not separate the pair")
    for i in range(len(kept)):
        for k in range(i + 1, len(kept)):
            if not is_anticomplete(G, kept[i].body, kept[k].body):
                raise MineabilityError(f"barriers {indices[i]} and {indices[k]} touch")
    cc = len(components(G.subgraph(C)))
    report = {"requested": w, "dropped_oversized": dropped, "size_cap": float(size_cap),
              "max_size": max(len(B.body) for B in kept), "core_components": cc,
              "core_component_bound": x * cert.y, "core_bound_ok": cc <= x * cert.y}
    return MinesToBarriers(C, kept, indices, oracle, size_cap, report)


# -- choosing one good barrier ---------------------------------------------

@dataclass
class GoodBarrier:
    barrier: Barrier
    index: int
    M: frozenset[int]
    report: dict = field(default_factory=dict)


def select_good_barrier(G: Graph, barriers: Sequence[Barrier], C: Iterable[int], t: int,
                        phi: float, a: int, b: int, budget: int | None = None) -> GoodBarrier:
    """Reduce every barrier and keep the one adjacent to the fewest core components.

    The returned barrier keeps only those components as its ``C``; the rest of
    the cores form ``M``.  The barrier is re-verified in ``G - M``.
    """
    if not barriers:
        raise GraphError("at least one barrier is required")
    C = G.check_vertices(C)
    core_comps = components(G.subgraph(C))
    best = None
    for i, B in enumerate(barriers):
        R = reduce_barrier(G, B, a, b, budget)
        seen = [K for K in core_comps if any(G.neighbors(v) & K for v in R.body)]
        if best is None or len(seen) < len(best[2]):
            best = (i, R, seen)
    i, R, seen = best
    C2 = frozenset().union(*seen) if seen else frozenset()
    M = C - C2
    chosen = Barrier(R.X, R.Y, R.Z, C2, R.t, R.p)
    H = G.remove(M)
    check = verify_barrier(H, chosen, budget)
    separates = barrier_separates(H, chosen, a, b)
    bound = phi * len(core_comps) * t / len(barriers)
    report = {"core_components": len(core_comps), "kept_components": len(seen),
              "kept_bound": bound, "kept_bound_ok": len(seen) <= bound,
              "reverified": check.ok, "separates": separates}
    if not check.ok or not separates:
        raise MineabilityError(f"selected barrier fails in G - M: {report}")
    return GoodBarrier(chosen, i, M, report)


def mineable_to_barrier(G: Graph, a: int, b: int, cert: MineCertificate, t: int, phi: float,
                        budget: int | None = None) -> GoodBarrier:
    """Layer the certificate into barriers and pick a good one, auditing all four bounds."""
    layered = mines_to_barriers(G, a, b, cert, t, budget)
    good = select_good_barrier(G, layered.barriers, layered.C, t, phi, a, b, budget)
    z, x, y, p = cert.z, cert.x, cert.y, cert.p
    cc_bound = Fraction(100, 99) * (4 * z + 2 * t) * Fraction(phi).limit_denominator() * y * t
    good.report.update({
        "core_components_bound": float(cc_bound),
        "core_components_ok": good.report["kept_components"] <= cc_bound,
        "deleted": len(good.M),
        "deleted_bound": x * y * p,
        "deleted_ok": len(good.M) <= x * y * p,
        "body_size": len(good.barrier.body),
        "body_bound": float(layered.size_cap),
        "body_ok": len(good.barrier.body) <= layered.size_cap,
        "barriers_available": len(layered.barriers),
    })
    return good
