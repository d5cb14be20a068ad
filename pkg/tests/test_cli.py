import csv
import io
import json
import math
from pathlib import Path

import pytest
from click.testing import CliRunner

from privamp.cli import floor_exp, main

DATA = Path(__file__).resolve().parents[1] / "data"
UNIFORM = str(DATA / "uniform2x2.json")
BSS = str(DATA / "binary_symmetric.json")


def run(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def test_bounds_json():
    res = run("bounds", "--dist", UNIFORM, "--M", 2, "--eps", 1, "--criterion", "Iprime", "--method", "simple")
    assert res.exit_code == 0, res.output
    rec = json.loads(res.output)
    assert rec["value"] == pytest.approx(math.log(2))
    assert rec["method"] == "simple" and rec["criterion"] == "Iprime"


def test_bounds_csv_and_bits():
    res = run("--bits", "bounds", "--dist", BSS, "--M", 2, "--eps", 1, "--criterion", "Iprime",
              "--method", "simple", "--format", "csv")
    assert res.exit_code == 0, res.output
    rows = list(csv.reader(io.StringIO(res.output)))
    assert rows[0] == ["method", "criterion", "M", "eps", "value", "s", "Rprime"]
    assert float(rows[1][4]) == pytest.approx(math.log2(2.36))


def test_bounds_fixed_s():
    res = run("bounds", "--dist", UNIFORM, "--M", 2, "--eps", 1, "--criterion", "d1prime",
              "--method", "renyi2", "--s", 0.5)
    assert json.loads(res.output)["value"] == pytest.approx(3.0)
    res = run("bounds", "--dist", UNIFORM, "--M", 2, "--eps", 1, "--criterion", "d1prime",
              "--method", "renyi2", "--s", 0.9)
    assert res.exit_code == 2


def test_bounds_iid_large_M():
    res = run("bounds", "--dist", BSS, "--M", 10**300, "--eps", 1, "--criterion", "d1prime",
              "--method", "min_tail", "--iid", 2000)
    assert res.exit_code == 0, res.output
    assert math.isfinite(json.loads(res.output)["value"])


def test_exponents_csv():
    res = run("exponents", "--dist", BSS, "--r-grid", "0:0.6:4", "--which", "e_d")
    assert res.exit_code == 0, res.output
    rows = list(csv.reader(io.StringIO(res.output)))
    assert rows[0] == ["which", "R", "value", "optimizer"]
    assert len(rows) == 5
    assert float(rows[-1][2]) == 0.0
    assert run("exponents", "--dist", BSS, "--r-grid", "bad").exit_code == 2


def test_second_order_csv():
    res = run("second-order", "--dist", BSS, "--R", 0, "--n-list", "25,100")
    assert res.exit_code == 0, res.output
    rows = list(csv.reader(io.StringIO(res.output)))
    assert rows[0] == ["n", "Rprime", "tail_term", "bound", "limit"]
    assert [r[0] for r in rows[1:]] == ["25", "100"]
    assert float(rows[1][4]) == pytest.approx(1.0)
    assert run("second-order", "--dist", UNIFORM, "--R", 0).exit_code == 2


def test_equivocation_json():
    res = run("equivocation", "--dist", BSS, "--R", 0.7, "--n", 50)
    assert res.exit_code == 0, res.output
    rec = json.loads(res.output)
    assert rec["log_M"] == pytest.approx(math.log(floor_exp(35.0)))
    assert rec["per_symbol"] == pytest.approx(rec["bound"] / 50)
    assert rec["limit"] == pytest.approx(0.7 - 0.5004024, abs=1e-7)
    assert rec["bound"] <= rec["log_M"] + 1e-12


def test_family_audit():
    res = run("family-audit", "--kind", "modified-toeplitz", "--q", 2, "--n", 2, "--m", 1)
    rec = json.loads(res.output)
    assert rec["epsilon_universal"] == 1.0 and rec["epsilon_dual"] == 1.0
    assert rec["delta_bias"] == pytest.approx(math.sqrt(0.5))
    assert rec["non_surjective_members"] == 0
    res = run("family-audit", "--kind", "full-random", "--q", 2, "--n", 2, "--m", 2, "--surjective-only")
    assert json.loads(res.output)["member_count"] == 6
    assert run("family-audit", "--kind", "toeplitz", "--q", 6, "--n", 2, "--m", 1).exit_code == 2


def test_verify_random(tmp_path):
    out = tmp_path / "report.json"
    res = run("verify", "--corpus", "random", "--seed", 5, "--count", 3, "--out", out)
    assert res.exit_code == 0, res.output
    summary = json.loads(res.output)
    assert summary["passed"] and summary["count"] == 3
    assert len(json.loads(out.read_text())["cases"]) == 3
    assert run("verify", "--corpus", "random").exit_code == 2


def test_input_errors(tmp_path):
    missing = run("bounds", "--dist", tmp_path / "none.json", "--M", 2, "--eps", 1,
                  "--criterion", "Iprime", "--method", "simple")
    assert missing.exit_code == 2
    cases = {
        "broken.json": ("{\n  \"mass\": [1,\n", ":3:"),
        "nofield.json": (json.dumps({"alphabetA": ["0"], "mass": [1]}), "'alphabetE'"),
        "size.json": (json.dumps({"alphabetA": ["0", "1"], "alphabetE": ["0"], "mass": [1]}), "'mass'"),
        "norm.json": (json.dumps({"alphabetA": ["0", "1"], "alphabetE": ["0"], "mass": [0.2, 0.2],
                                  "normalized": True}), "'normalized'"),
        "neg.json": (json.dumps({"alphabetA": ["0", "1"], "alphabetE": ["0"], "mass": [-0.2, 0.2]}), "'mass'"),
    }
    for name, (text, needle) in cases.items():
        p = tmp_path / name
        p.write_text(text)
        res = run("bounds", "--dist", p, "--M", 2, "--eps", 1, "--criterion", "d1prime", "--method", "simple")
        assert res.exit_code == 2, name
        assert needle in res.output, (name, res.output)


def test_output_is_byte_stable():
    args = ("bounds", "--dist", BSS, "--M", 3, "--eps", 0.5, "--criterion", "d1prime", "--method", "min_tail")
    assert run(*args).stdout_bytes == run(*args).stdout_bytes


def test_floor_exp():
    assert floor_exp(1.0) == 2
    assert floor_exp(0.0) == 1
    big = floor_exp(800.0)
    assert 10**347 < big < 10**348
