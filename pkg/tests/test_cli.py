from __future__ import annotations

import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from quiverstab import cli, corpus


def data(name):
    return str(corpus.data_path(name))


def schema(name):
    return json.loads((resources.files("quiverstab") / "schemas" / f"{name}.json").read_text())


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def invoke_json(*argv):
    code, out, err = invoke(*argv)
    return code, json.loads(out), err


CASES = [
    ("check", "k2.qv"),
    ("check", "k2_taut.qv"),
    ("euler", "k2.qv"),
    ("euler", "loop_x2.qv"),
    ("pairing-report", "a3.qv"),
    ("stable", "k2.qv"),
    ("hn", "k2.qv"),
    ("jh", "k2.qv"),
    ("jh", "loop_x2.qv"),
    ("walls", "k2.qv", "--actual"),
    ("walls", "a3.qv", "--actual"),
    ("chambers", "k2.qv"),
    ("chambers", "a3.qv"),
    ("census", "k2.qv"),
    ("nef", "k2_taut.qv"),
    ("nef", "a3.qv"),
    ("sequiv", "k2.qv", "--rep", "m10", "--rep", "m01"),
    ("sweep", "k2_taut.qv", "--draws", "5"),
]


@pytest.mark.parametrize("case", CASES, ids=lambda c: "-".join(c[:2]))
def test_outputs_match_schemas(case):
    cmd, fname, *rest = case
    code, doc, _ = invoke_json(cmd, data(fname), *rest)
    assert code == 0, doc
    jsonschema.validate(doc, schema("envelope"))
    jsonschema.validate(doc["result"], schema(cmd))
    assert doc["command"] == cmd and doc["status"] == "ok"


def test_nef_taut_values():
    code, doc, _ = invoke_json("nef", data("k2_taut.qv"))
    res = doc["result"]
    assert code == 0
    assert res["ell_determinant"] == res["ell_charge"] == "1/2"
    assert res["dichotomy"] == "confirmed_positive"


def test_nef_flagged_exits_3():
    code, doc, _ = invoke_json("nef", data("k2_v21.qv"))
    assert code == 3 and doc["status"] == "invariant_violation"
    assert doc["result"]["dichotomy"] == "flagged"


def test_walls_k2():
    code, doc, _ = invoke_json("walls", data("k2.qv"), "--actual")
    walls = doc["result"]["walls"]
    assert len(walls) == 1 and walls[0]["w"] == [1, 0]
    (verdict,) = doc["result"]["actual"]
    assert verdict["actual"] is True and verdict["points"] == [["0", "0"]]


def test_chambers_k2():
    _, doc, _ = invoke_json("chambers", data("k2.qv"), "--v", "1,1", "--theta=-1,1")
    assert len(doc["result"]["chambers"]) == 2


def test_parameter_overrides():
    _, doc, _ = invoke_json("stable", data("k2.qv"), "--theta", "1,-1")
    jsonschema.validate(doc["result"], schema("stable"))
    assert doc["result"]["params"]["theta"] == ["1", "-1"]


@pytest.mark.parametrize("case", [("census", "k2.qv"), ("nef", "k2_taut.qv"), ("sweep", "a3.qv")])
def test_deterministic_output(case):
    a = invoke(*[case[0], data(case[1])])[1]
    b = invoke(*[case[0], data(case[1])])[1]
    assert a == b


def test_parallel_sweep_matches_serial():
    a = invoke("sweep", data("k2.qv"), "--draws", "4", "--jobs", "1")[1]
    b = invoke("sweep", data("k2.qv"), "--draws", "4", "--jobs", "2")[1]
    assert a == b


def test_bad_document_reports_position(tmp_path):
    bad = tmp_path / "bad.qv"
    bad.write_text("vertices 1 2\narrow a 1 2\nrep r p=2 dim 1 1\nmat q 1 1: 1\n")
    code, doc, err = invoke_json("check", str(bad))
    assert code == 1
    jsonschema.validate(doc, schema("error"))
    assert doc["status"] == "error"
    assert doc["error"]["line"] == 4 and doc["error"]["column"] == 5
    assert "unknown arrow" in err


def test_missing_file():
    code, doc, _ = invoke_json("check", "/nonexistent/file.qv")
    assert code == 1 and doc["status"] == "error"


def test_cap_exceeded_exit_code():
    code, doc, err = invoke_json("census", data("k2.qv"), "--v", "2,2", "--theta=-1,1", "--cap-census", "10")
    assert code == 2
    assert doc["error"]["code"] == "cap_exceeded"


def test_caps_from_env(monkeypatch):
    assert cli.caps_from_env("submodules=7, iso=9")["submodules"] == 7
    with pytest.raises(Exception):
        cli.caps_from_env("bogus=1")
    with pytest.raises(Exception):
        cli.caps_from_env("iso=0")
    monkeypatch.setenv("QUIVERSTAB_CAPS", "census=10")
    code, doc, _ = invoke_json("census", data("k2.qv"), "--v", "2,2", "--theta=-1,1")
    assert code == 2
    code, doc, _ = invoke_json("census", data("k2.qv"), "--cap-census", "100")
    assert code == 0 and doc["caps"]["census"] == 100


def test_csv_outputs():
    code, out, _ = invoke("census", data("k2.qv"), "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) >= 2 and "," in lines[0]
    code, out, _ = invoke("chambers", data("a3.qv"), "--format", "csv")
    assert code == 0 and out.count("\n") >= 3


def test_human_output():
    code, out, _ = invoke("nef", data("k2_taut.qv"), "--format", "human")
    assert code == 0 and "1/2" in out


def test_console_script():
    res = subprocess.run(
        [sys.executable, "-m", "quiverstab.cli", "euler", data("k2.qv")], capture_output=True, text=True, check=False
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["command"] == "euler"
