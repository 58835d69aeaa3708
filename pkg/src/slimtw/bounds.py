"""Bound arithmetic: separator-size recursion, closed forms and the width sequence.

All logarithms are base 2.  Values that overflow floats are carried in
``mpmath`` with 60 significant digits; sequences that explode are kept as
base-2 logarithms.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import mpmath

from .graph import GraphError

__all__ = [
    "FunctionSpec",
    "BoundParams",
    "psi",
    "sep_slim_bound",
    "bound_h",
    "bound_H_recursive",
    "ratio_hypothesis",
    "log_r_sequence",
    "bound_r_sequence",
    "closed_form_check",
    "chain_check",
]

mpmath.mp.dps = 60


@dataclass(frozen=True)
class FunctionSpec:
    """``coef * n**exponent`` (``coef * log2(n)`` for kind ``log``), optionally floored.

    ``kind`` is one of ``const``, ``power`` or ``log``.
    """

    kind: str = "const"
    coef: float = 1.0
    exponent: float = 1.0
    floor: bool = False

    def __post_init__(self):
        if self.kind not in ("const", "power", "log"):
            raise GraphError(f"unknown function kind {self.kind!r}")

    def __call__(self, n):
        n = mpmath.mpf(n)
        if self.kind == "const":
            value = mpmath.mpf(self.coef)
        elif self.kind == "power":
            value = self.coef * n ** mpmath.mpf(self.exponent)
        else:
            value = self.coef * mpmath.log(n, 2)
        return mpmath.floor(value) if self.floor else value

    @classmethod
    def from_json(cls, data: dict) -> "FunctionSpec":
        return cls(**data)


@dataclass(frozen=True)
class BoundParams:
    """Injected constants for the separator engine and the bound formulas.

    ``t`` is the excluded-minor size, ``(p, q)`` the slimness parameters
    (every stable set of size ``p`` holds a ``q``-slim pair), ``r`` the
    measure bound of the star-based decompositions and ``x`` the certificate
    length requested from the mining step.
    """

    t: int = 1
    p: int = 2
    q: int = 2
    r: int = 1
    x: int = 8
    phi: float = 1.0
    delta: float = 2.0
    delta2: float = 1.0
    d1: float = 1.0
    d2: float = 1.0
    d3: float = 1.0
    c0: float | None = None
    c: FunctionSpec = field(default_factory=lambda: FunctionSpec("const", 2.0))
    f: FunctionSpec = field(default_factory=lambda: FunctionSpec("power", 1.0, 0.5, True))
    g: FunctionSpec = field(default_factory=lambda: FunctionSpec("power", 0.5, 1.0, True))

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "BoundParams":
        data = dict(data)
        for key in ("c", "f", "g"):
            if key in data and isinstance(data[key], dict):
                data[key] = FunctionSpec.from_json(data[key])
        return cls(**data)


def psi(t: int, q: int, phi: float) -> mpmath.mpf:
    """``(100**2 / 99) * (4 + 2t)**2 * phi * (q - 1)``."""
    if t < 1 or q < 1 or phi <= 0:
        raise GraphError("psi needs t, q >= 1 and phi > 0")
    return mpmath.mpf(100) ** 2 / 99 * (4 + 2 * t) ** 2 * mpmath.mpf(phi) * (q - 1)


def sep_slim_bound(n: int, r: float) -> mpmath.mpf:
    """``2 ** (5 (log r + sqrt(log n log r)))``, the size promised for a slim pair."""
    if n < 2 or r < 1:
        raise GraphError("need n >= 2 and r >= 1")
    lr, ln = mpmath.log(r, 2), mpmath.log(n, 2)
    return mpmath.power(2, 5 * (lr + mpmath.sqrt(ln * lr)))


def _cp(n, params: BoundParams):
    return params.c(n) * params.p


def bound_h(n: int, params: BoundParams) -> mpmath.mpf:
    """Closed form ``20 (f + 3 c^2 p^2) (c p) ** (2 log n / log(n / g))`` at ``n``."""
    g = params.g(n)
    if not 0 < g < n:
        raise GraphError(f"need 0 < g(n) < n, got g({n}) = {g}")
    cp = _cp(n, params)
    expo = 2 * mpmath.log(n, 2) / mpmath.log(mpmath.mpf(n) / g, 2)
    return 20 * (params.f(n) + 3 * cp ** 2) * cp ** expo


def bound_H_recursive(n: int, N: int, params: BoundParams) -> mpmath.mpf:
    """``H(n) = n`` for ``n <= 10``, else ``f(N) + 3(c(N)p)^2 + (c(N)p)^2 H(g(n))``."""
    K = params.f(N) + 3 * _cp(N, params) ** 2
    z = _cp(N, params) ** 2
    chain = []
    m = mpmath.mpf(n)
    while m > 10:
        chain.append(m)
        nxt = params.g(m)
        if not nxt < m:
            raise GraphError(f"g({m}) = {nxt} does not shrink")
        m = nxt
    value = m
    for _ in chain:
        value = K + z * value
    return value


def ratio_hypothesis(points, params: BoundParams) -> list[int]:
    """Sampled points where ``n / g(n)`` increases with ``n`` (hypothesis violations)."""
    pts = sorted(points)
    ratios = [mpmath.mpf(n) / params.g(n) for n in pts]
    return [pts[i + 1] for i in range(len(pts) - 1) if ratios[i + 1] > ratios[i]]


def _loglog_term(n: int, d3: float) -> mpmath.mpf:
    ln = mpmath.log(n, 2)
    return d3 * mpmath.log(ln, 2)


def log_r_sequence(n: int, params: BoundParams, length: int | None = None) -> list[mpmath.mpf]:
    """``log2 r_0, ..., log2 r_k`` with ``k = d1**2`` unless ``length`` is given."""
    if n < 2:
        raise GraphError("n must be at least 2")
    r0 = max(psi(params.t, params.q, params.phi),
             mpmath.power(3 * params.t * mpmath.mpf(params.d1) ** 2, params.d2))
    if r0 < 1:
        raise GraphError("r_0 must be at least 1")
    steps = int(params.d1 ** 2) if length is None else length
    ln = mpmath.log(n, 2)
    out = [mpmath.log(r0, 2)]
    for _ in range(steps):
        A = out[-1] + _loglog_term(n, params.d3)
        if A <= 0:
            raise GraphError("log(r_i log^d3 n) must be positive")
        out.append(9 * A + 5 * mpmath.sqrt(A * ln))
    return out


def bound_r_sequence(n: int, params: BoundParams, length: int | None = None) -> list[mpmath.mpf]:
    return [mpmath.power(2, L) for L in log_r_sequence(n, params, length)]


def _c0(params: BoundParams) -> mpmath.mpf:
    if params.c0 is not None:
        return mpmath.mpf(params.c0)
    r0 = mpmath.power(2, log_r_sequence(4, params, 0)[0])
    return r0 + 18 * mpmath.mpf(params.d3)


def closed_form_check(n: int, i: int, params: BoundParams) -> bool:
    """``log2 r_i <= 16**i c0 log^(1 - 1/2**i) n`` with ``c0 = r0 + 18 d3`` by default."""
    L = log_r_sequence(n, params, i)[i]
    ln = mpmath.log(n, 2)
    return L <= mpmath.power(16, i) * _c0(params) * mpmath.power(ln, 1 - mpmath.mpf(1) / 2 ** i)


def chain_check(n: int, i: int, params: BoundParams) -> bool:
    """The inductive inequality from step ``i`` to ``i + 1`` at ``n``:
    ``9 c L^(1-e) + 9 d3 loglog n + 5 sqrt(c) L^(1-e/2) + 5 sqrt(d3 loglog n L) <= 16 c L^(1-e/2)``
    with ``c = 16**i c0``, ``e = 1/2**i`` and ``L = log n``.
    """
    c = mpmath.power(16, i) * _c0(params)
    e = mpmath.mpf(1) / 2 ** i
    L = mpmath.log(n, 2)
    ll = mpmath.log(L, 2) if L > 1 else mpmath.mpf(0)
    d3 = mpmath.mpf(params.d3)
    lhs = (9 * c * L ** (1 - e) + 9 * d3 * ll + 5 * mpmath.sqrt(c) * L ** (1 - e / 2)
           + 5 * mpmath.sqrt(d3 * ll * L))
    return lhs <= 16 * c * L ** (1 - e / 2)
