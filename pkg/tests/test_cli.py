import json
import math
import subprocess
import sys
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from weightreg.cli import main
from weightreg.graph import (
    Graph,
    complete,
    complete_bipartite,
    cycle,
    example1,
    example1_partition,
    load_partition,
    path,
    random_connected_graph,
    save_edge_list,
    save_partition,
)
from weightreg.partitions import is_weight_regular
from weightreg.report import AnalysisReport
from weightreg.spectra import perron_vector

SQ2 = math.sqrt(2)


def _write(tmp_path, name, g):
    f = tmp_path / name
    f.write_text(save_edge_list(g))
    return f


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_example1(tmp_path, capsys):
    g = _write(tmp_path, "example1.el", example1())
    part = tmp_path / "example1.part"
    part.write_text(save_partition(example1_partition()))
    code, out, _ = _run(capsys, "analyze", g, part, "--json")
    assert code == 0
    rep = json.loads(out)
    ps = rep["partition"]
    assert ps["weightRegular"] and ps["regular"]
    assert ps["BStar"][0][1] == pytest.approx(2 * SQ2, abs=1e-7)
    assert ps["B"][0][1] == 4
    assert rep["characterizations"]["commutation"]["commutes"]
    assert rep["characterizations"]["consistent"]


def test_analyze_text_output(tmp_path, capsys):
    g = _write(tmp_path, "example1.el", example1())
    part = tmp_path / "example1.part"
    part.write_text(save_partition(example1_partition()))
    code, out, _ = _run(capsys, "analyze", g, part)
    assert code == 0
    assert "weight-regular=True" in out and "2.828427" in out


def test_analyze_k4(tmp_path, capsys):
    code, out, _ = _run(capsys, "analyze", _write(tmp_path, "k4.el", complete(4)), "--json")
    ch = json.loads(out)["chromatic"]
    assert code == 0
    assert ch["chi"] == 4 and ch["hoffmanBound"] == pytest.approx(4) and ch["multiplicityLambdaN"] == 3


def test_analyze_disconnected(tmp_path, capsys):
    code, _, err = _run(capsys, "analyze", _write(tmp_path, "d.el", Graph.from_edges(4, [(0, 1), (2, 3)])))
    assert code == 1 and "Perron vector requires connected graph" in err


def test_analyze_parse_error(tmp_path, capsys):
    f = tmp_path / "bad.el"
    f.write_text("0 1\n1 two\n")
    code, _, err = _run(capsys, "analyze", f)
    assert code == 1 and "line 2" in err


def test_analyze_missing_file(tmp_path, capsys):
    code, _, _ = _run(capsys, "analyze", tmp_path / "nope.el")
    assert code == 1


def test_analyze_skips_chromatic_over_cap(tmp_path, capsys):
    code, out, _ = _run(capsys, "analyze", _write(tmp_path, "c12.el", cycle(12)), "--chi-cap", "8", "--json")
    assert code == 0 and "skipped" in json.loads(out)["chromatic"]
    code, out, _ = _run(capsys, "analyze", _write(tmp_path, "c12.el", cycle(12)), "--chi-cap", "8", "--force", "--json")
    assert json.loads(out)["chromatic"]["chi"] == 2


def test_hoffman_c5(tmp_path, capsys):
    code, out, _ = _run(capsys, "hoffman", _write(tmp_path, "c5.el", cycle(5)), "--json", "--enumerate")
    ch = json.loads(out)["chromatic"]
    assert code == 0
    assert ch["hoffmanBound"] == pytest.approx(2.236068, abs=1e-6)
    assert ch["chi"] == 3 and ch["isHoffmanColoring"] is False
    assert ch["optimalColorings"] == 5


def test_hoffman_k33(tmp_path, capsys):
    code, out, _ = _run(capsys, "hoffman", _write(tmp_path, "k33.el", complete_bipartite(3, 3)), "--json")
    ch = json.loads(out)["chromatic"]
    assert code == 0
    assert ch["hoffmanBound"] == pytest.approx(2) and ch["chi"] == 2 and ch["isHoffmanColoring"]


def test_hoffman_edgeless(tmp_path, capsys):
    code, _, err = _run(capsys, "hoffman", _write(tmp_path, "k1.el", Graph(1, frozenset())))
    assert code == 1 and "edge" in err


def test_hoffman_resource_cap(tmp_path, capsys):
    code, _, err = _run(capsys, "hoffman", _write(tmp_path, "c12.el", cycle(12)), "--chi-cap", "8")
    assert code == 2 and "cap" in err
    code, _, _ = _run(capsys, "hoffman", _write(tmp_path, "c12.el", cycle(12)), "--enumerate", "--enum-cap", "8")
    assert code == 2


def test_refine_examples(tmp_path, capsys):
    code, out, _ = _run(capsys, "refine", _write(tmp_path, "p3.el", path(3)))
    assert code == 0 and load_partition(out, 3).classes == ((0, 2), (1,))
    code, out, _ = _run(capsys, "refine", _write(tmp_path, "k4.el", complete(4)))
    assert load_partition(out, 4).m == 1
    code, out, _ = _run(capsys, "refine", _write(tmp_path, "ex1.el", example1()))
    assert load_partition(out, 9).refines(example1_partition())
    code, out, _ = _run(capsys, "refine", _write(tmp_path, "p3.el", path(3)), "--seed", "trivial")
    assert load_partition(out, 3).m == 1


def test_refine_from_seed_file_is_idempotent(tmp_path, capsys):
    g = random_connected_graph(10, 0.3, np.random.default_rng(4))
    gf = _write(tmp_path, "g.el", g)
    seed = tmp_path / "seed.part"
    seed.write_text("0 1 2 3 4\n5 6 7 8 9\n")
    out1 = tmp_path / "r1.part"
    assert main(["refine", str(gf), str(seed), "-o", str(out1)]) == 0
    p1 = load_partition(out1.read_text(), 10)
    assert is_weight_regular(g, perron_vector(g), p1)
    capsys.readouterr()
    code, out2, _ = _run(capsys, "refine", gf, out1)
    assert load_partition(out2, 10) == p1


def test_json_round_trip_and_determinism(tmp_path, capsys):
    g = _write(tmp_path, "example1.el", example1())
    part = tmp_path / "example1.part"
    part.write_text(save_partition(example1_partition()))
    _, a, _ = _run(capsys, "analyze", g, part, "--json", "--no-timestamp", "--enumerate")
    _, b, _ = _run(capsys, "analyze", g, part, "--json", "--no-timestamp", "--enumerate")
    assert a == b and "generatedAt" not in json.loads(a)
    rep = AnalysisReport.from_json(a)
    assert rep.to_json() == a
    # floats survive at full precision
    assert json.loads(a)["perron"]["lambda1"] == pytest.approx(2 * SQ2, abs=1e-14)
    _, c, _ = _run(capsys, "analyze", g, part, "--json")
    assert "generatedAt" in json.loads(c)


def test_tolerance_flags_reach_the_report(tmp_path, capsys):
    _, out, _ = _run(capsys, "analyze", _write(tmp_path, "p3.el", path(3)), "--json", "--tol-wr", "1e-5")
    assert json.loads(out)["tolerances"]["weightRegular"] == 1e-5


def test_batch(tmp_path, capsys):
    d = tmp_path / "graphs"
    d.mkdir()
    _write(d, "a.el", cycle(5))
    _write(d, "b.el", example1())
    (d / "b.part").write_text(save_partition(example1_partition()))
    for jobs in ("1", "2"):
        code, out, _ = _run(capsys, "batch", d, "--jobs", jobs, "--no-timestamp")
        res = json.loads(out)
        assert code == 0 and [r["file"] for r in res] == ["a.el", "b.el"]
        assert res[1]["report"]["partition"]["weightRegular"]
    _write(d, "c.el", Graph.from_edges(4, [(0, 1), (2, 3)]))
    code, out, _ = _run(capsys, "batch", d)
    assert code == 1 and "error" in json.loads(out)[2]


def test_console_entry_point(tmp_path):
    f = _write(tmp_path, "k33.el", complete_bipartite(3, 3))
    res = subprocess.run(
        [sys.executable, "-m", "weightreg", "hoffman", str(f), "--json"], capture_output=True, text=True, check=True
    )
    assert json.loads(res.stdout)["chromatic"]["chi"] == 2


SCHEMA = json.loads((Path(__file__).parents[1] / "docs" / "report.schema.json").read_text())


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", "EX", "PART", "--json", "--enumerate"],
        ["analyze", "EX", "--json"],
        ["analyze", "K1", "--json"],
        ["analyze", "C12", "--json", "--chi-cap", "8"],
        ["hoffman", "C12", "--json", "--no-timestamp"],
    ],
)
def test_reports_match_schema(tmp_path, capsys, argv):
    files = {
        "EX": _write(tmp_path, "ex.el", example1()),
        "K1": _write(tmp_path, "k1.el", Graph(1, frozenset())),
        "C12": _write(tmp_path, "c12.el", cycle(12)),
        "PART": tmp_path / "ex.part",
    }
    files["PART"].write_text(save_partition(example1_partition()))
    code, out, _ = _run(capsys, *[files.get(a, a) for a in argv])
    assert code == 0
    jsonschema.validate(json.loads(out), SCHEMA)
