import csv
import json

import pytest

from entire_interp.cli import main, random_config
from entire_interp.records import read_json, write_json


@pytest.fixture
def cfg_path(tmp_path):
    p = tmp_path / "config.json"
    write_json(p, random_config(5, size=3))
    return p


def _construct(tmp_path, cfg_path, name="rec.json"):
    out = tmp_path / name
    assert main(["construct", "--config", str(cfg_path), "--out", str(out)]) == 0
    return out


def test_construct_writes_records_and_manifest(tmp_path, cfg_path):
    out = _construct(tmp_path, cfg_path)
    doc = read_json(out)
    assert len(doc["stages"]) == 6
    man = read_json(tmp_path / "rec.manifest.json")
    assert man["stages"] == 6 and len(man["configDigest"]) == 64


def test_construct_is_byte_identical(tmp_path, cfg_path):
    a = _construct(tmp_path, cfg_path, "a.json")
    b = _construct(tmp_path, cfg_path, "b.json")
    assert a.read_bytes() == b.read_bytes()


def test_verify_pass_and_report(tmp_path, cfg_path, capsys):
    out = _construct(tmp_path, cfg_path)
    assert main(["verify", str(out)]) == 0
    report = read_json(tmp_path / "rec.report.json")
    assert report["status"] == "PASS"
    assert main(["report", str(tmp_path / "rec.report.json"), "--out", str(tmp_path / "r.csv")]) == 0
    rows = list(csv.reader(open(tmp_path / "r.csv")))
    assert rows[0] == ["stage", "invariant", "status", "witness"]
    assert len(rows) - 1 == 6 * 7


def test_tampered_m_exits_3(tmp_path, cfg_path, capsys):
    out = _construct(tmp_path, cfg_path)
    doc = read_json(out)
    st = next(s for s in doc["stages"] if s["case"] == "A")
    st["M"] = "2/1"
    write_json(out, doc)
    assert main(["verify", str(out)]) == 3
    err = capsys.readouterr().err
    assert f"stage {st['n']} invariant IV" in err


def test_truncated_records_exit_1(tmp_path, cfg_path, capsys):
    out = _construct(tmp_path, cfg_path)
    out.write_text(out.read_text()[:200])
    assert main(["verify", str(out)]) == 1
    assert "invalid JSON" in capsys.readouterr().err


def test_bad_config_exit_1(tmp_path, capsys):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"point": ["0", "0"], "w": ["1", "2/x"], "stages": 2}))
    assert main(["construct", "--config", str(p), "--out", str(tmp_path / "o.json")]) == 1
    assert "w[1]" in capsys.readouterr().err
    p.write_text(json.dumps({"point": ["0", "0"], "w": ["1", "2/2"], "stages": 2}))
    assert main(["construct", "--config", str(p), "--out", str(tmp_path / "o.json")]) == 1
    assert main(["verify", str(tmp_path / "missing.json")]) == 1


def test_eval_and_invert(tmp_path, cfg_path, capsys):
    out = _construct(tmp_path, cfg_path)
    doc = read_json(out)
    capsys.readouterr()
    assert main(["eval", str(out), "--z", "1/2+1/3i"]) == 0
    box = json.loads(capsys.readouterr().out)
    assert box["radius2"] == "0/1"
    w = doc["config"]["w"][0]
    assert main(["invert", str(out), f"--w={w}"]) == 0
    x = capsys.readouterr().out.strip()
    assert x
    assert main(["invert", str(out), "--w=12345"]) == 2
    assert main(["eval", str(out), "--z", "5"]) == 2


def test_outdir_env(tmp_path, cfg_path, monkeypatch):
    monkeypatch.setenv("ENTIRE_INTERP_OUTDIR", str(tmp_path / "outs"))
    assert main(["construct", "--config", str(cfg_path), "--out", "r.json"]) == 0
    assert (tmp_path / "outs" / "r.json").exists()
    assert (tmp_path / "outs" / "r.manifest.json").exists()


def test_random_config_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["random-config", "--seed", "4", "--out", str(a)]) == 0
    assert main(["random-config", "--seed", "4", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert read_json(a)["stages"] == 12


def test_sparse_system_command(tmp_path):
    p = tmp_path / "sys.json"
    write_json(p, {"points": [["0", "0"], ["1", "1/2"], ["-1/3", "2"]], "reals": ["5/2", "-3/4"]})
    out = tmp_path / "system"
    assert main(["sparse-system", "--config", str(p), "--out", str(out), "--workers", "1"]) == 0
    assert sorted(x.name for x in out.iterdir()) == [
        "components.json", "construction_0.json", "construction_1.json", "construction_2.json",
        "sparseness.csv", "sparseness.json",
    ]
    assert read_json(out / "components.json")["status"] == "PASS"


def test_empty_system_is_vacuous(tmp_path):
    p = tmp_path / "sys.json"
    write_json(p, {"points": [], "reals": []})
    assert main(["sparse-system", "--config", str(p), "--out", str(tmp_path / "s"), "--workers", "1"]) == 0
