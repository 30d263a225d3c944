import json
import subprocess
import sys

import pytest

from bdtwist.bdstruct import CompatibleForm
from bdtwist.cli import SCHEMA_VERSION, main
from bdtwist.qfa import braiding_R, vector_rep
from bdtwist.rootdata import build

from conftest import FIXTURES


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


@pytest.mark.parametrize("typ,rank,count", [("A", 1, 0), ("A", 2, 2), ("A", 4, 20), ("D", 4, 12)])
def test_triples(capsys, typ, rank, count):
    code, doc, _ = run(capsys, "triples", typ, str(rank))
    assert code == 0
    assert doc["schema_version"] == SCHEMA_VERSION
    assert doc["count"] == count


def test_triples_lists_sl5_pair(capsys):
    _, doc, _ = run(capsys, "triples", "A", "4")
    assert {"pi1": [1, 2], "pi2": [3, 4], "tau": {"1": 3, "2": 4}} in doc["triples"]


def test_compat_cg(capsys):
    code, doc, _ = run(capsys, "compat", "--config", str(FIXTURES / "cg_sl3.json"))
    assert code == 0
    assert doc["solution_space"]["dim"] == 0
    assert abs(float(eval(doc["form"]["u"][0][1]))) == 1
    assert doc["lattices"]["L1"] == [["1/3", "0"]]
    code, doc, _ = run(capsys, "compat", "--config", str(FIXTURES / "cg_sl3.json"), "--sign", "minus")
    assert doc["form"]["u"][0][1] == "-1"
    code, doc, _ = run(capsys, "compat", "--config", str(FIXTURES / "cg_sl3.json"), "--omega", "root")
    assert doc["lattices"]["L1"] == [["1", "0"]]


def test_compat_disjoint_zero_form(capsys):
    code, doc, _ = run(capsys, "compat", "--config", str(FIXTURES / "disjoint_sl4.json"))
    assert code == 0
    assert all(x == "0" for row in doc["form"]["u"] for x in row)


def test_compat_double(capsys):
    code, doc, _ = run(capsys, "compat", "--config", str(FIXTURES / "double_a2.json"))
    assert code == 0
    assert doc["root"]["rank"] == 4


def test_compat_rejects_bad_form(capsys):
    code, doc, err = run(capsys, "compat", "--config", str(FIXTURES / "bad_form.json"))
    assert code == 2
    assert "not compatible" in json.loads(err)["error"]


def test_compat_rejects_bad_triple(tmp_path, capsys):
    p = tmp_path / "t.json"
    p.write_text(json.dumps({"root": {"type": "A", "rank": 3}, "triple": {"pi1": [1, 2], "pi2": [2, 3], "tau": {"1": 2, "2": 3}}}))
    code, _, err = run(capsys, "compat", "--config", str(p))
    assert code == 2 and "overlap" in err


def test_twist_cg_writes_outputs(tmp_path, capsys):
    code, doc, _ = run(capsys, "twist", "--config", str(FIXTURES / "cg_sl3.json"), "--out", str(tmp_path))
    assert code == 0 and doc["pass"]
    for name in ("r.json", "r_prime.json", "twist_report.json"):
        assert json.loads((tmp_path / name).read_text())["schema_version"] == SCHEMA_VERSION
    code, doc, _ = run(capsys, "verify", str(tmp_path / "r_prime.json"))
    assert code == 0
    assert doc["support"] == "nonstandard"


def test_twist_empty_triple(tmp_path, capsys):
    code, doc, _ = run(capsys, "twist", "--config", str(FIXTURES / "empty_sl3.json"), "--out", str(tmp_path))
    assert code == 0
    assert json.loads((tmp_path / "r.json").read_text())["entries"] == json.loads((tmp_path / "r_prime.json").read_text())["entries"]


def test_twist_toml_sl5(capsys):
    code, doc, _ = run(capsys, "twist", "--config", str(FIXTURES / "sl5_pair.toml"))
    assert code == 0 and doc["pass"]


def test_twist_needs_type_a(capsys):
    code, _, err = run(capsys, "twist", "--config", str(FIXTURES / "double_a2.json"))
    assert code == 2 and "type A" in err


def test_twist_output_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    run(capsys, "twist", "--config", str(FIXTURES / "cg_sl3.json"), "--out", str(a))
    run(capsys, "twist", "--config", str(FIXTURES / "cg_sl3.json"), "--out", str(b))
    for name in ("r.json", "r_prime.json", "twist_report.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_verify_standard_and_failures(tmp_path, capsys):
    rd = build("A", 2)
    R = braiding_R(vector_rep(rd, CompatibleForm.zero(rd)))
    p = tmp_path / "r.json"
    p.write_text(json.dumps(R.to_json()))
    code, doc, _ = run(capsys, "verify", str(p))
    assert code == 0 and doc["support"] == "standard pattern"
    bad = R.to_json()
    bad["entries"].append([0, 4, [[1, 1, 0, 1]]])
    p.write_text(json.dumps(bad))
    code, doc, _ = run(capsys, "verify", str(p))
    assert code == 1 and not doc["pass"]
    bad["entries"][-1][2] = [[1, 0, 0, 1]]
    p.write_text(json.dumps(bad))
    assert run(capsys, "verify", str(p))[0] == 2
    p.write_text("{not json")
    assert run(capsys, "verify", str(p))[0] == 2
    assert run(capsys, "verify", str(tmp_path / "missing.json"))[0] == 2


def test_bad_arguments(capsys):
    assert main(["nonsense"]) == 2
    assert main(["compat", "--config", str(FIXTURES / "cg_sl3.json"), "--omega", "nope"]) == 2
    assert main(["compat", "--config", str(FIXTURES / "cg_sl3.json"), "--height-cap", "0"]) == 2
    capsys.readouterr()


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "bdtwist", "triples", "A", "2"], capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["count"] == 2
