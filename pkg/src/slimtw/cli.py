"""Command-line front end.

Exit codes: 0 success, 1 property refuted (the witness is written as the
artifact), 2 usage or input error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from . import __version__
from .barriers import Barrier, MineCertificate, mineable_to_barrier, verify_barrier, verify_mineable
from .bounds import BoundParams, bound_h, bound_H_recursive, closed_form_check, log_r_sequence, psi
from .decomposition import (StarForest, TreeDecomposition, exact_treewidth, f_measure,
                            heuristic_decomposition, is_balanced_separator, normalize_weights,
                            project_forest, verify_td)
from .graph import Graph, GraphError, format_edge_list, generate, is_separator, parse_edge_list
from .minors import MinorModel, class_membership, find_induced_minor, max_clique, verify_model
from .pipeline import MembershipRefuted, contraction_provider, treewidth_bound_pipeline
from .separators import (HypothesisViolated, ProviderError, Trace, balanced_separator_slim, basket,
                         mineslim, separate_slim_pair)
from .slimness import BudgetExhausted, PathFamily, check_path_family, check_tq_slim, max_anticomplete_paths

DEFAULT_BUDGET = 200_000
PARAM_NAMES = ("t", "p", "q", "r", "x", "phi", "d1", "d2", "d3", "c0")
FLOAT_PARAMS = {"phi", "d1", "d2", "d3", "c0"}


class Refuted(Exception):
    """The checked property fails; ``artifact`` is the witness."""

    def __init__(self, message: str, artifact: dict):
        super().__init__(message)
        self.artifact = artifact


# -- io --------------------------------------------------------------------

def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        os.unlink(tmp)
        raise


def _read_graph(path: str) -> Graph:
    return parse_edge_list(Path(path).read_text())


def _read_json(path: str) -> dict:
    return json.loads(Path(path).read_text())


def forest_to_json(F: StarForest) -> dict:
    return {"kind": "star-forest", "stars": [[c, sorted(l)] for c, l in zip(F.centers, F.leaves)]}


def forest_from_json(G: Graph, data: dict) -> StarForest:
    stars = sorted((int(c), frozenset(map(int, l))) for c, l in data["stars"])
    F = StarForest(tuple(c for c, _ in stars), tuple(l for _, l in stars))
    problems = F.check(G)
    if problems:
        raise GraphError("invalid star forest: " + "; ".join(problems[:3]))
    return F


def _sorted(xs) -> list[int]:
    return sorted(int(v) for v in xs)


# -- parameters ------------------------------------------------------------

def _params(args) -> BoundParams:
    """Defaults, overridden by ``--config``, overridden by explicit flags."""
    values: dict = {}
    if args.config:
        cfg = _read_json(args.config)
        values.update({k: v for k, v in cfg.items() if k in BoundParams.__dataclass_fields__})
    for name in PARAM_NAMES:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    return BoundParams.from_json(values)


def _config_value(args, name: str, default=None):
    flag = getattr(args, name, None)
    if flag is not None:
        return flag
    if args.config:
        cfg = _read_json(args.config)
        if name in cfg:
            return cfg[name]
    return default


def _budget(args) -> int:
    value = _config_value(args, "budget")
    if value is None:
        value = os.environ.get("SLIMTW_BUDGET", DEFAULT_BUDGET)
    try:
        value = int(value)
    except (TypeError, ValueError):
        raise GraphError(f"budget must be an integer, got {value!r}") from None
    if value <= 0:
        raise GraphError("budget must be positive")
    return value


def _require(args, *names) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise GraphError("missing required option(s): " + ", ".join("--" + n for n in missing))


def _forest(args, G: Graph) -> StarForest:
    return forest_from_json(G, _read_json(args.forest)) if args.forest else StarForest.empty()


def _needed_measure(G: Graph, F: StarForest) -> int:
    """Measure bound met by the contraction provider on ``G`` itself."""
    td = contraction_provider(F)(G)
    Fg = project_forest(F, G.vertices)
    return max([1] + [f_measure(Fg, bag) for bag in td.bags])


# -- commands --------------------------------------------------------------

def cmd_gen(args) -> str:
    params = {k: getattr(args, k) for k in ("n", "m", "s", "t", "x", "seed") if getattr(args, k) is not None}
    return format_edge_list(generate(args.kind, **params))


def cmd_check_minor(args) -> str:
    G = _read_graph(args.graph)
    budget = _budget(args)
    if args.pattern:
        H = _read_graph(args.pattern)
        res = find_induced_minor(G, H, budget)
        if res.status == "budget-exhausted":
            raise BudgetExhausted("induced minor search budget exhausted")
        out = {"kind": "minor-search", "status": res.status, "expansions": res.expansions}
        if res.model is not None:
            raise Refuted("pattern is an induced minor", {"kind": "minor-model", **res.model.to_json()})
        return _dump(out)
    _require(args, "t")
    member = class_membership(G, args.t, budget)
    if member.status == "not_in_Ct":
        raise Refuted(f"graph contains {member.pattern_name}",
                      {"kind": "minor-model", "pattern_name": member.pattern_name, **member.model.to_json()})
    if member.status == "unknown":
        raise BudgetExhausted("membership undecided within budget")
    return _dump({"kind": "membership", "status": member.status, "t": args.t})


def cmd_clique(args) -> str:
    G = _read_graph(args.graph)
    K = max_clique(G)
    art = {"kind": "clique", "vertices": _sorted(K), "size": len(K)}
    if args.t is not None and len(K) >= args.t:
        raise Refuted(f"clique of size {len(K)} >= {args.t}", art)
    return _dump(art)


def _family_json(fam: PathFamily) -> dict:
    return {"kind": "path-family", "a": fam.a, "b": fam.b, "paths": [list(p) for p in fam.paths]}


def cmd_slim(args) -> str:
    G = _read_graph(args.graph)
    _require(args, "s")
    budget = _budget(args)
    if args.a is not None or args.b is not None:
        _require(args, "a", "b")
        fam = max_anticomplete_paths(G, args.a, args.b, args.s, budget)
        if len(fam) >= args.s:
            raise Refuted(f"pair is {args.s}-wide", _family_json(fam))
        return _dump({"kind": "slim-pair", "a": args.a, "b": args.b, "s": args.s, "paths": len(fam)})
    _require(args, "t")
    res = check_tq_slim(G, args.t, args.s, budget)
    if not res.ok:
        raise Refuted("stable set without a slim pair", {
            "kind": "slim-counterexample", "stable_set": list(res.stable_set),
            "families": [_family_json(f) for _, f in sorted(res.families.items())]})
    return _dump({"kind": "slim-graph", "t": args.t, "s": args.s, "ok": True})


def cmd_basket(args) -> str:
    G = _read_graph(args.graph)
    _require(args, "td", "a", "b", "q")
    td = TreeDecomposition.from_pace(Path(args.td).read_text())
    ok, problems = verify_td(G, td)
    if not ok:
        raise GraphError("invalid decomposition: " + "; ".join(problems[:3]))
    nodes = basket(G, td, args.a, args.b, args.q)
    union = frozenset().union(*(td.bags[i] for i in nodes)) - {args.a, args.b}
    return _dump({"kind": "basket", "a": args.a, "b": args.b, "q": args.q, "nodes": list(nodes),
                  "union": _sorted(union)})


def _provider_params(args, G: Graph, F: StarForest) -> BoundParams:
    params = _params(args)
    explicit_r = args.r is not None or (args.config and "r" in _read_json(args.config))
    if not explicit_r:
        params = replace(params, r=_needed_measure(G, F))
    return params


def cmd_mine(args) -> str:
    G = _read_graph(args.graph)
    _require(args, "a", "b")
    F = _forest(args, G)
    params = _provider_params(args, G, F)
    res = mineslim(G, F, params.r, params.q, params.x, args.a, args.b, contraction_provider(F))
    if res.separated:
        return _dump({"kind": "separator", "a": args.a, "b": args.b, "separator": _sorted(res.D),
                      "rounds": res.rounds})
    return _dump({"kind": "mine-certificate", "a": args.a, "b": args.b, "deleted": _sorted(res.D),
                  "certificate": res.certificate.to_json()})


def cmd_barrier(args) -> str:
    G = _read_graph(args.graph)
    _require(args, "cert")
    data = _read_json(args.cert)
    a = data["a"] if args.a is None else args.a
    b = data["b"] if args.b is None else args.b
    cert = MineCertificate.from_json(data.get("certificate", data))
    H = G.remove(data.get("deleted", []))
    params = _params(args)
    # the barrier must touch as many core components as the slimness stable-set size
    touch = args.t if args.t is not None else params.p
    good = mineable_to_barrier(H, a, b, cert, touch, params.phi, _budget(args))
    return _dump({"kind": "barrier", "a": a, "b": b, "deleted": _sorted(set(data.get("deleted", [])) | good.M),
                  "barrier": good.barrier.to_json(), "report": good.report})


def cmd_separate(args) -> str:
    G = _read_graph(args.graph)
    _require(args, "a", "b")
    F = _forest(args, G)
    params = _provider_params(args, G, F)
    trace = Trace()
    S = separate_slim_pair(G, args.a, args.b, params, F, contraction_provider(F), trace=trace)
    if args.trace:
        _write(args.trace, trace.to_jsonl())
    return _dump({"kind": "separator", "a": args.a, "b": args.b, "separator": _sorted(S)})


def cmd_balanced_sep(args) -> str:
    G = _read_graph(args.graph)
    F = _forest(args, G)
    params = _provider_params(args, G, F)
    weights = None
    if args.weights:
        weights = {int(k): Fraction(str(v)) for k, v in _read_json(args.weights)["weights"].items()}
    trace = Trace()
    S = balanced_separator_slim(G, weights, F, params, contraction_provider(F), trace)
    if args.trace:
        _write(args.trace, trace.to_jsonl())
    art = {"kind": "balanced-separator", "separator": _sorted(S)}
    if weights is not None:
        art["weights"] = {str(k): str(v) for k, v in sorted(weights.items())}
    return _dump(art)


def cmd_decompose(args) -> str:
    G = _read_graph(args.graph)
    if args.method == "heuristic":
        td = heuristic_decomposition(G)
    else:
        _require(args, "t")
        res = treewidth_bound_pipeline(G, args.t, _params(args), _budget(args))
        td = res.td
        if args.trace:
            _write(args.trace, res.trace_jsonl())
    return td.to_pace(G.n)


def cmd_tw_exact(args) -> str:
    G = _read_graph(args.graph)
    width, td = exact_treewidth(G, cap=args.cap)
    if args.td_out:
        _write(args.td_out, td.to_pace(G.n))
    return f"{width}\n"


def cmd_bound(args) -> str:
    _require(args, "n")
    params = _params(args)
    n = args.n
    out: dict = {"kind": "bound", "n": n, "params": params.to_json()}
    out["psi"] = str(psi(params.t, params.q, params.phi))
    if n >= 2:
        length = args.i if args.i is not None else None
        seq = log_r_sequence(n, params, length)
        out["log2_r"] = [str(v) for v in seq]
        out["closed_form"] = [bool(closed_form_check(n, i, params)) for i in range(len(seq))]
    try:
        out["h"] = str(bound_h(n, params))
        out["H"] = str(bound_H_recursive(n, n, params))
        out["H_le_h"] = bool(bound_H_recursive(n, n, params) <= bound_h(n, params))
    except GraphError as exc:
        out["h_error"] = str(exc)
    return _dump(out)


# -- verification ----------------------------------------------------------

def _verify_artifact(G: Graph, text: str) -> tuple[bool, str]:
    stripped = text.lstrip()
    if stripped.startswith(("s td", "c")) and not stripped.startswith("{"):
        td = TreeDecomposition.from_pace(text)
        ok, problems = verify_td(G, td)
        return ok, "; ".join(problems) or f"valid decomposition of width {td.width}"
    data = json.loads(text)
    kind = data.get("kind")
    if kind == "separator":
        ok = is_separator(G, data["separator"], data["a"], data["b"])
        return ok, "separates" if ok else "does not separate"
    if kind == "balanced-separator":
        raw = {int(k): Fraction(v) for k, v in data["weights"].items()} if "weights" in data else None
        ok = is_balanced_separator(G, normalize_weights(G, raw), data["separator"])
        return ok, "balanced" if ok else "not balanced"
    if kind == "minor-model":
        ok, problems = verify_model(G, MinorModel.from_json(data))
        return ok, "; ".join(problems) or "valid model"
    if kind == "mine-certificate":
        ok, why = verify_mineable(G.remove(data["deleted"]), data["a"], data["b"],
                                  MineCertificate.from_json(data["certificate"]))
        return ok, why or "valid certificate"
    if kind == "barrier":
        H = G.remove(data["deleted"])
        check = verify_barrier(H, Barrier.from_json(data["barrier"]))
        return check.ok, check.message or "valid barrier"
    if kind == "clique":
        vs = data["vertices"]
        ok = all(G.has_edge(u, v) for i, u in enumerate(vs) for v in vs[i + 1:])
        return ok, "clique" if ok else "not a clique"
    if kind == "path-family":
        problems = check_path_family(G, PathFamily(data["a"], data["b"], tuple(map(tuple, data["paths"]))))
        return not problems, "; ".join(problems) or "valid family"
    if kind == "slim-counterexample":
        problems = []
        for fam in data["families"]:
            problems += check_path_family(G, PathFamily(fam["a"], fam["b"], tuple(map(tuple, fam["paths"]))))
        return not problems, "; ".join(problems) or "valid counterexample"
    if kind == "basket":
        ok = is_separator(G, data["union"], data["a"], data["b"]) and len(data["nodes"]) < data["q"]
        return ok, "valid basket" if ok else "invalid basket"
    if kind in ("minor-search", "membership", "slim-pair", "slim-graph", "bound", "star-forest"):
        return True, f"{kind} report carries no witness"
    raise GraphError(f"unknown artifact kind {kind!r}")


def cmd_verify(args) -> str:
    G = _read_graph(args.graph)
    ok, message = _verify_artifact(G, Path(args.artifact).read_text())
    result = {"kind": "verification", "ok": ok, "message": message}
    if not ok:
        raise Refuted(message, result)
    return _dump(result)


# -- parser ----------------------------------------------------------------

def _add_params(p: argparse.ArgumentParser) -> None:
    for name in PARAM_NAMES:
        if name == "t":
            continue
        p.add_argument(f"--{name}", type=float if name in FLOAT_PARAMS else int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slimtw", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with parameters; flags take precedence")
    common.add_argument("--out", help="artifact path (default: stdout)")
    common.add_argument("--budget", type=int, help="search step budget (default: $SLIMTW_BUDGET or 200000)")
    common.add_argument("--t", type=int)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, graph=True, params=False, help=None):
        p = sub.add_parser(name, parents=[common], help=help)
        if graph:
            p.add_argument("graph", help="edge-list file")
        if params:
            _add_params(p)
        p.set_defaults(func=func)
        return p

    p = add("gen", cmd_gen, graph=False, help="generate a graph")
    p.add_argument("--kind", required=True)
    for name in ("n", "m", "s", "x", "seed"):
        p.add_argument(f"--{name}", type=int)

    p = add("check-minor", cmd_check_minor, help="search an induced minor or test class membership")
    p.add_argument("--pattern", help="edge-list file of the pattern graph")

    add("clique", cmd_clique, help="maximum clique; with --t, refute cliques of size t")

    p = add("slim", cmd_slim, help="slimness of a pair or of the whole graph")
    for name in ("a", "b", "s"):
        p.add_argument(f"--{name}", type=int)

    p = add("basket", cmd_basket, help="few bags meeting every path of a slim pair")
    p.add_argument("--td", help="PACE decomposition file")
    for name in ("a", "b", "q"):
        p.add_argument(f"--{name}", type=int)

    for name, func, hlp in (("mine", cmd_mine, "mine a slim pair"),
                            ("separate", cmd_separate, "separate a slim pair")):
        p = add(name, func, params=True, help=hlp)
        p.add_argument("--a", type=int)
        p.add_argument("--b", type=int)
        p.add_argument("--forest", help="star-forest JSON file")
        if name == "separate":
            p.add_argument("--trace", help="JSON-lines trace path")

    p = add("barrier", cmd_barrier, params=True, help="turn a certificate into a good barrier")
    p.add_argument("--cert", help="certificate JSON (as written by mine)")
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)

    p = add("balanced-sep", cmd_balanced_sep, params=True, help="half-balanced separator")
    p.add_argument("--weights", help='JSON file {"weights": {vertex: weight}}')
    p.add_argument("--forest")
    p.add_argument("--trace")

    p = add("decompose", cmd_decompose, params=True, help="tree decomposition in PACE format")
    p.add_argument("--method", choices=("pipeline", "heuristic"), default="pipeline")
    p.add_argument("--trace")

    p = add("tw-exact", cmd_tw_exact, help="exact treewidth")
    p.add_argument("--cap", type=int, default=16)
    p.add_argument("--td-out", help="write the optimal decomposition here")

    p = add("bound", cmd_bound, graph=False, params=True, help="bound arithmetic at n")
    p.add_argument("--n", type=int)
    p.add_argument("--i", type=int, help="length of the width sequence")

    p = add("verify", cmd_verify, help="re-check an artifact against its graph")
    p.add_argument("artifact")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = args.func(args)
    except Refuted as exc:
        _write(args.out, _dump(exc.artifact))
        print(f"refuted: {exc}", file=sys.stderr)
        return 1
    except MembershipRefuted as exc:
        _write(args.out, _dump({"kind": "minor-model", "pattern_name": exc.pattern, **exc.model.to_json()}))
        print(f"refuted: {exc}", file=sys.stderr)
        return 1
    except HypothesisViolated as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return 1
    except ProviderError as exc:
        print(f"provider failure: {exc}", file=sys.stderr)
        return 1
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 3
    except (GraphError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _write(args.out, text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
