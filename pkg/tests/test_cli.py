import json
import random

import pytest

from oracles import separated, subdivided_caterpillar
from slimtw.cli import forest_to_json, main
from slimtw.decomposition import StarForest, TreeDecomposition, verify_td
from slimtw.graph import (caterpillar, complete, complete_bipartite, cycle, format_edge_list, hex_grid,
                          parse_edge_list, path)


@pytest.fixture
def write(tmp_path):
    def put(name, content):
        target = tmp_path / name
        if not isinstance(content, str):
            content = format_edge_list(content) if hasattr(content, "edges") else json.dumps(content)
        target.write_text(content)
        return str(target)

    return put


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_is_seeded(tmp_path, capsys):
    first = tmp_path / "a.txt"
    assert run(["gen", "--kind", "random", "--n", 12, "--m", 20, "--seed", 3, "--out", first], capsys)[0] == 0
    code, out, _ = run(["gen", "--kind", "random", "--n", 12, "--m", 20, "--seed", 3], capsys)
    assert code == 0 and out == first.read_text()
    assert parse_edge_list(out).m == 20


def test_gen_hex_uses_t(capsys):
    code, out, _ = run(["gen", "--kind", "hex", "--t", 2], capsys)
    assert code == 0 and parse_edge_list(out) == hex_grid(2)


def test_usage_errors_exit_two(write, capsys):
    assert run(["gen", "--kind", "random", "--n", 5], capsys)[0] == 2
    assert run(["gen"], capsys)[0] == 2
    assert run(["clique", "/does/not/exist"], capsys)[0] == 2
    assert run(["slim", write("g.txt", path(4))], capsys)[0] == 2
    assert run(["clique", write("bad.txt", "3 1\n0 9\n")], capsys)[0] == 2


def test_check_minor_with_pattern(write, tmp_path, capsys):
    G = write("g.txt", cycle(6))
    code, out, _ = run(["check-minor", G, "--pattern", write("k3.txt", complete(3)),
                        "--out", tmp_path / "m.json"], capsys)
    assert code == 1
    assert json.loads((tmp_path / "m.json").read_text())["kind"] == "minor-model"
    assert run(["verify", G, tmp_path / "m.json"], capsys)[0] == 0
    code, out, _ = run(["check-minor", G, "--pattern", write("k4.txt", complete(4))], capsys)
    assert code == 0 and json.loads(out)["status"] == "not-found"


def test_check_minor_membership(write, tmp_path, capsys):
    code, _, _ = run(["check-minor", write("k33.txt", complete_bipartite(3, 3)), "--t", 3,
                      "--out", tmp_path / "w.json"], capsys)
    assert code == 1
    code, out, _ = run(["check-minor", write("p.txt", path(6)), "--t", 3], capsys)
    assert code == 0 and json.loads(out)["status"] == "in_Ct"


def test_budget_exhaustion_exits_three(write, capsys, monkeypatch):
    G = write("g.txt", complete_bipartite(2, 8))
    assert run(["slim", G, "--a", 0, "--b", 1, "--s", 8, "--budget", 2], capsys)[0] == 3
    monkeypatch.setenv("SLIMTW_BUDGET", "2")
    assert run(["slim", G, "--a", 0, "--b", 1, "--s", 8], capsys)[0] == 3
    assert run(["slim", G, "--a", 0, "--b", 1, "--s", 8, "--budget", 10 ** 6], capsys)[0] == 1
    cfg = write("cfg.json", {"budget": 2})
    monkeypatch.delenv("SLIMTW_BUDGET")
    assert run(["slim", G, "--a", 0, "--b", 1, "--s", 8, "--config", cfg], capsys)[0] == 3


def test_clique(write, capsys):
    G = write("k4.txt", complete(4))
    code, out, _ = run(["clique", G], capsys)
    assert code == 0 and json.loads(out)["size"] == 4
    assert run(["clique", G, "--t", 4], capsys)[0] == 1
    assert run(["clique", G, "--t", 5], capsys)[0] == 0


def test_slim_pair_and_graph(write, tmp_path, capsys):
    C4 = write("c4.txt", cycle(4))
    code, out, _ = run(["slim", C4, "--a", 0, "--b", 2, "--s", 3], capsys)
    assert code == 0 and json.loads(out)["paths"] == 2
    code, _, _ = run(["slim", C4, "--a", 0, "--b", 2, "--s", 2, "--out", tmp_path / "fam.json"], capsys)
    assert code == 1 and run(["verify", C4, tmp_path / "fam.json"], capsys)[0] == 0
    K33 = write("k33.txt", complete_bipartite(3, 3))
    code, _, _ = run(["slim", K33, "--t", 2, "--s", 3, "--out", tmp_path / "cx.json"], capsys)
    assert code == 1 and run(["verify", K33, tmp_path / "cx.json"], capsys)[0] == 0
    code, out, _ = run(["slim", write("c8.txt", cycle(8)), "--t", 2, "--s", 3], capsys)
    assert code == 0 and json.loads(out)["ok"]


def test_basket(write, tmp_path, capsys):
    G = write("p5.txt", path(5))
    td = TreeDecomposition(tuple(frozenset({i, i + 1}) for i in range(4)), ((0, 1), (1, 2), (2, 3)))
    tdf = write("p5.td", td.to_pace(5))
    out_path = tmp_path / "basket.json"
    assert run(["basket", G, "--td", tdf, "--a", 0, "--b", 4, "--q", 2, "--out", out_path], capsys)[0] == 0
    assert len(json.loads(out_path.read_text())["nodes"]) == 1
    assert run(["verify", G, out_path], capsys)[0] == 0
    assert run(["basket", write("c4.txt", cycle(4)), "--td", write("c4.td", "s td 1 4 4\nb 1 1 2 3 4\n"),
                "--a", 0, "--b", 2, "--q", 2], capsys)[0] == 1
    bad_td = write("bad.td", "s td 1 2 5\nb 1 1 2\n")
    assert run(["basket", G, "--td", bad_td, "--a", 0, "--b", 4, "--q", 2], capsys)[0] == 2


def caterpillar_files(write):
    G, stars, a, b = subdivided_caterpillar(8, random.Random(1))
    stars.sort()
    F = StarForest(tuple(c for c, _ in stars), tuple(frozenset([l]) for _, l in stars))
    return G, write("cat.txt", G), write("forest.json", forest_to_json(F)), a, b


def test_mine_barrier_and_verify(write, tmp_path, capsys):
    G, gpath, fpath, a, b = caterpillar_files(write)
    cert = tmp_path / "cert.json"
    code, _, _ = run(["mine", gpath, "--a", a, "--b", b, "--forest", fpath, "--q", 2, "--x", 8,
                      "--r", 3637, "--out", cert], capsys)
    assert code == 0 and json.loads(cert.read_text())["kind"] == "mine-certificate"
    assert run(["verify", gpath, cert], capsys)[0] == 0
    barrier = tmp_path / "barrier.json"
    assert run(["barrier", gpath, "--cert", cert, "--out", barrier], capsys)[0] == 0
    data = json.loads(barrier.read_text())
    assert data["report"]["reverified"] and data["barrier"]["t"] == 2
    assert run(["verify", gpath, barrier], capsys)[0] == 0


def test_barrier_on_plain_caterpillar_certificate(write, tmp_path, capsys):
    from slimtw.barriers import caterpillar_certificate
    a, b, cert = caterpillar_certificate(60)
    G = write("cat60.txt", caterpillar(60))
    cert_path = write("cert.json", {"kind": "mine-certificate", "a": a, "b": b, "deleted": [],
                                    "certificate": cert.to_json()})
    code, out, _ = run(["barrier", G, "--cert", cert_path, "--t", 1], capsys)
    assert code == 0 and json.loads(out)["report"]["barriers_available"] == 10
    assert run(["barrier", G, "--cert", cert_path], capsys)[0] == 2


def test_mine_without_forest_separates(write, capsys):
    code, out, _ = run(["mine", write("p.txt", path(15)), "--a", 0, "--b", 14], capsys)
    data = json.loads(out)
    assert code == 0 and data["kind"] == "separator" and separated(path(15), data["separator"], 0, 14)


def test_separate_with_trace(write, tmp_path, capsys):
    G, gpath, fpath, a, b = caterpillar_files(write)
    out_path, trace = tmp_path / "sep.json", tmp_path / "trace.jsonl"
    code, _, _ = run(["separate", gpath, "--a", a, "--b", b, "--forest", fpath, "--r", 3637,
                      "--trace", trace, "--out", out_path], capsys)
    assert code == 0
    assert separated(G, json.loads(out_path.read_text())["separator"], a, b)
    records = [json.loads(l) for l in trace.read_text().splitlines()]
    assert records[-1]["kind"] == "barrier"
    assert run(["verify", gpath, out_path], capsys)[0] == 0


def test_separate_wide_pair_exits_one(write, capsys):
    code, _, err = run(["separate", write("c12.txt", cycle(12)), "--a", 0, "--b", 6], capsys)
    assert code == 1 and "hypothesis violated" in err


def test_invalid_forest_is_rejected(write, capsys):
    G = write("p.txt", path(4))
    bad = write("f.json", {"kind": "star-forest", "stars": [[0, [1]], [3, [2]]]})
    assert run(["separate", G, "--a", 0, "--b", 3, "--forest", bad], capsys)[0] == 2


def test_balanced_separator(write, tmp_path, capsys):
    G = write("p9.txt", path(9))
    weights = write("w.json", {"weights": {"4": 1}})
    out_path = tmp_path / "bal.json"
    assert run(["balanced-sep", G, "--weights", weights, "--out", out_path], capsys)[0] == 0
    data = json.loads(out_path.read_text())
    assert 4 in data["separator"] and run(["verify", G, out_path], capsys)[0] == 0
    code, out, _ = run(["balanced-sep", G], capsys)
    assert code == 0 and json.loads(out)["kind"] == "balanced-separator"


def test_decompose_methods(write, tmp_path, capsys):
    G = write("c6.txt", cycle(6))
    code, out, _ = run(["decompose", G, "--t", 3, "--trace", tmp_path / "t.jsonl"], capsys)
    assert code == 0 and TreeDecomposition.from_pace(out).width == 2
    assert (tmp_path / "t.jsonl").read_text().strip()
    code, out, _ = run(["decompose", G, "--method", "heuristic"], capsys)
    assert code == 0 and verify_td(cycle(6), TreeDecomposition.from_pace(out))[0]
    assert run(["decompose", G], capsys)[0] == 2
    code, _, _ = run(["decompose", write("k33.txt", complete_bipartite(3, 3)), "--t", 3,
                      "--out", tmp_path / "model.json"], capsys)
    assert code == 1 and json.loads((tmp_path / "model.json").read_text())["kind"] == "minor-model"


def test_tw_exact(write, tmp_path, capsys):
    G = write("k33.txt", complete_bipartite(3, 3))
    td_path = tmp_path / "k33.td"
    code, out, _ = run(["tw-exact", G, "--td-out", td_path], capsys)
    assert code == 0 and out == "3\n"
    code, out, _ = run(["verify", G, td_path], capsys)
    assert code == 0 and json.loads(out)["ok"]
    assert run(["tw-exact", write("p.txt", path(20)), "--cap", 10], capsys)[0] == 2


def test_verify_detects_bad_artifacts(write, capsys):
    G = write("p5.txt", path(5))
    assert run(["verify", G, write("s.json", {"kind": "separator", "a": 0, "b": 4, "separator": []})],
               capsys)[0] == 1
    assert run(["verify", G, write("c.json", {"kind": "clique", "vertices": [0, 2]})], capsys)[0] == 1
    assert run(["verify", G, write("td.td", "s td 1 2 5\nb 1 1 2\n")], capsys)[0] == 1
    assert run(["verify", G, write("x.json", {"kind": "mystery"})], capsys)[0] == 2


def test_bound_command_and_precedence(write, capsys):
    code, out, _ = run(["bound", "--n", 1024, "--i", 3], capsys)
    data = json.loads(out)
    assert code == 0 and len(data["log2_r"]) == 4 and all(data["closed_form"])
    assert abs(float(data["psi"]) - 3636.3636) < 1e-3
    cfg = write("cfg.json", {"q": 3, "phi": 2.0})
    data = json.loads(run(["bound", "--n", 64, "--config", cfg], capsys)[1])
    assert data["params"]["q"] == 3 and data["params"]["phi"] == 2.0
    data = json.loads(run(["bound", "--n", 64, "--config", cfg, "--q", 4], capsys)[1])
    assert data["params"]["q"] == 4 and data["params"]["phi"] == 2.0
    assert run(["bound"], capsys)[0] == 2


def test_outputs_are_byte_identical(write, tmp_path, capsys):
    G = write("g.txt", hex_grid(2))
    outs = []
    for i in range(2):
        target = tmp_path / f"d{i}.td"
        assert run(["decompose", G, "--t", 3, "--out", target], capsys)[0] == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]


def test_version(capsys):
    assert run(["--version"], capsys)[0] == 0
