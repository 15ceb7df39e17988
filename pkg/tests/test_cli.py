import csv
import io
import json
import math

import pytest

from discdist.algebra import HomogeneousPoly, bombieri_dot, normalized
from discdist.cli import main
from discdist.polyio import write_poly
from discdist.univariate import make_C, make_T


def strip_times(doc):
    doc = json.loads(json.dumps(doc))
    doc["manifest"].pop("timestamps")
    return doc


def invoke(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


@pytest.fixture
def quadric_file(tmp_path):
    f = tmp_path / "q.poly"
    write_poly(HomogeneousPoly.from_dict(3, 2, {(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): -1}), f)
    return str(f)


def test_dist_on_quadric(quadric_file, capsys):
    code, out = invoke(["--restarts", "16", "dist", quadric_file, "--general-check"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["dist"] == pytest.approx(1.0, rel=1e-9)  # norm sqrt(3), normalized dist 1/sqrt(3)
    assert all(r["rel_diff"] < 1e-8 for r in doc["general_check"])
    man = doc["manifest"]
    assert man["seed"] == 0 and man["backend"].startswith("binary64/")
    assert quadric_file in man["inputs"]


def test_degenerate_exit_code(tmp_path, capsys):
    f = tmp_path / "x5.poly"
    write_poly(HomogeneousPoly.from_dict(2, 5, {(5, 0): 1.0}), f)
    code, _ = invoke(["dist", str(f)], capsys)
    assert code == 3


def test_parse_error_exit_code(tmp_path, capsys):
    f = tmp_path / "bad.poly"
    f.write_text("homopoly 2 2\n1 0 1.0\n")
    assert invoke(["dist", str(f)], capsys)[0] == 2
    assert invoke(["dist", str(tmp_path / "missing.poly")], capsys)[0] == 2


def test_classify_cusp(tmp_path, capsys):
    f = tmp_path / "t15.poly"
    write_poly(make_T(1, 5), f)
    code, out = invoke(["classify", str(f)], capsys)
    doc = json.loads(out)
    assert code == 0
    assert [p["kind"] for p in doc["points"]] == ["cusp"]


def test_determinism_and_seed_env(quadric_file, capsys, monkeypatch):
    a = strip_times(json.loads(invoke(["--seed", "4", "dist", quadric_file], capsys)[1]))
    b = strip_times(json.loads(invoke(["--seed", "4", "dist", quadric_file], capsys)[1]))
    assert a == b
    monkeypatch.setenv("DISCDIST_SEED", "4")
    c = json.loads(invoke(["dist", quadric_file], capsys)[1])
    assert c["manifest"]["seed"] == 4
    assert c["dist"] == a["dist"]


def test_out_flag(quadric_file, tmp_path, capsys):
    out = tmp_path / "r.json"
    code, text = invoke(["--out", str(out), "dist", quadric_file], capsys)
    assert code == 0 and text == ""
    assert json.loads(out.read_text())["format"] == 1


def test_univariate_trd(capsys):
    code, out = invoke(["univariate", "--trd", "2", "6"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["error"] < 1e-8
    assert doc["closed_form"] == pytest.approx(2 / math.sqrt(6))


def test_univariate_domain_error(capsys):
    assert invoke(["univariate", "--trd", "2", "5"], capsys)[0] == 2


def test_identities_csv(capsys):
    code, out = invoke(["univariate", "--identities", "6"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows
    assert {r["identity"] for r in rows} == {"cos", "sin"}
    assert max(float(r["max_error"]) for r in rows) < 1e-12


def test_gram(capsys):
    doc = json.loads(invoke(["univariate", "--gram", "4"], capsys)[1])
    assert doc["detV"] == pytest.approx(doc["det_direct"], rel=1e-10)
    assert doc["gram_vs_bombieri"] < 1e-12


def test_table(capsys):
    doc = json.loads(invoke(["--restarts", "32", "table", "--dmax", "4"], capsys)[1])
    assert [r["d"] for r in doc["rows"]] == [2, 3, 4]
    assert [r["norm_sq"] for r in doc["rows"]] == ["3", "7", "47/3"]
    assert max(r["error"] for r in doc["rows"]) < 1e-8


def test_bounds(quadric_file, capsys):
    code, out = invoke(["bounds", quadric_file, "--samples", "2000"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert all(c["pass"] for c in doc["checks"])


def test_optimize_checkpoint_and_resume(tmp_path, capsys):
    C = normalized(make_C(3))
    Q = HomogeneousPoly(2, 3, [0.3, -1.0, 0.7, 0.2])
    Q = normalized(Q - bombieri_dot(Q, C) * C)
    f = tmp_path / "seed.poly"
    write_poly(normalized(C + 0.05 * Q), f)
    ck = tmp_path / "ck.json"
    code, out = invoke(
        ["optimize", str(f), "--max-iters", "10", "--checkpoint", str(ck), "--checkpoint-every", "5"], capsys
    )
    first = json.loads(out)
    assert code == 0 and ck.exists()
    code, out = invoke(["optimize", "--resume", str(ck), "--max-iters", "500"], capsys)
    resumed = json.loads(out)
    assert code == 0 and resumed["converged"]
    assert resumed["trajectory"][: len(first["trajectory"])] == first["trajectory"]
    assert resumed["row"]["dist"] >= 0.5 - 1e-6
    assert resumed["certificate"]["residual"] <= 1e-8


def test_optimize_requires_input(capsys):
    with pytest.raises(SystemExit):
        main(["optimize"])
