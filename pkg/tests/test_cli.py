import json

import pytest

from polarcoord import __version__
from polarcoord.cli import EXIT_CAP, EXIT_CONFIG, EXIT_INVARIANT, run
from polarcoord.channels import make_bsc


def _run(tmp_path, *argv, name="out.json"):
    out = tmp_path / name
    code = run(list(argv) + ["--out", str(out)])
    return code, out


def test_region_example1(tmp_path):
    code, out = _run(tmp_path, "region", "example1", "--p", "0.15", "--eps", "0.4", name="r.csv")
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "q,r_min,sum_min"
    first = [float(v) for v in lines[1].split(",")]
    last = [float(v) for v in lines[-1].split(",")]
    assert first[1:] == [1.0, 1.0]
    assert last[1] == pytest.approx(0.39016, abs=1e-5) and last[2] == pytest.approx(0.75606, abs=1e-5)
    assert len(lines) == 202
    meta = json.loads((tmp_path / "r.csv.json").read_text())
    assert meta["eps"] == 0.4
    assert (tmp_path / "r_reference.csv").exists()


def test_coordinate_exact(tmp_path):
    code, out = _run(tmp_path, "coordinate", "--wx", "bsc:0.1", "--wy", "bsc:0.2", "--m", "2", "--exact")
    assert code == 0
    doc = json.loads(out.read_text())
    assert isinstance(doc["exact_tv_l1"], float)
    assert doc["version"] == __version__ and doc["config"]["m"] == 2


def test_determinism(tmp_path):
    argv = ["coordinate", "--m", "2", "--trials", "3000", "--seed", "9"]
    _, a = _run(tmp_path, *argv)
    first = a.read_bytes()
    _, b = _run(tmp_path, *argv)
    assert b.read_bytes() == first
    _, c = _run(tmp_path, "coordinate", "--m", "2", "--trials", "3000", "--seed", "10", name="c.json")
    assert json.loads(c.read_text())["empirical"] != json.loads(first)["empirical"]


def test_resolve_reports(tmp_path):
    code, out = _run(tmp_path, "resolve", "--channel", "bsc:0.3", "--m", "2", "--trials", "1000")
    doc = json.loads(out.read_text())
    assert code == 0 and doc["exact_kl_bits"] <= doc["kl_bound_bits"] + 1e-12
    code, out = _run(tmp_path, "resolve", "--channel", "bec:0.3", "--m", "5", "--cap", "1024", name="big.json")
    assert code == 0 and json.loads(out.read_text())["exact_tv_l1"] == "bounded, not computed"


def test_spec_file_and_config(tmp_path):
    spec = tmp_path / "ch.json"
    spec.write_text(json.dumps(make_bsc(0.3).to_dict()))
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"m": 1, "beta": 0.2}))
    code, out = _run(tmp_path, "resolve", "--spec", str(spec), "--config", str(cfg))
    doc = json.loads(out.read_text())
    assert code == 0 and doc["config"]["m"] == 1 and doc["config"]["beta"] == 0.2
    code, out = _run(tmp_path, "resolve", "--spec", str(spec), "--config", str(cfg), "--m", "2", name="o2.json")
    assert json.loads(out.read_text())["config"]["m"] == 2


def test_exit_codes(tmp_path):
    assert run(["construct", "--wx", "bec:0.3"]) == EXIT_CONFIG
    assert run(["construct", "--beta", "0.7"]) == EXIT_CONFIG
    assert run(["resolve", "--spec", str(tmp_path / "nope.json")]) == EXIT_CONFIG
    assert run(["oracle", "capacities", "--channel", "bec:0.3", "--m", "4", "--cap", "1000"]) == EXIT_CAP
    bad = tmp_path / "cfg.json"
    bad.write_text(json.dumps({"bogus": 1}))
    assert run(["construct", "--config", str(bad)]) == EXIT_CONFIG
    with pytest.raises(SystemExit) as exc:
        run(["construct", "--m", "x"])
    assert exc.value.code == 2


def test_invariant_exit(tmp_path, monkeypatch):
    from polarcoord import cli
    from polarcoord.errors import NestingViolation

    def boom(args):
        raise NestingViolation("forced for the test")
    monkeypatch.setitem(cli.COMMANDS, "construct", boom)
    assert run(["construct"]) == EXIT_INVARIANT


def test_oracle_and_construct(tmp_path, capsys):
    assert run(["oracle", "bit-channel", "--channel", "bsc:0.3", "--m", "2", "--index", "4"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["capacity"] == pytest.approx(0.38056628, abs=1e-8)
    assert run(["oracle", "coordination", "--m", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["tv_l1"] <= doc["encoder_tv_l1"] + doc["ensemble_tv_l1"] + 1e-12
    assert run(["construct", "--m", "3", "--wy", "bsc-bec:0.1,0.2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["code"]["rate_r"] + doc["code"]["rate_r0"] <= 1


def test_region_general_and_example2(capsys):
    assert run(["region", "general", "--p", "0.15", "--eps", "0.4", "--q", "0.15"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["corner"]["r"] == pytest.approx(0.39016, abs=1e-5)
    assert run(["region", "example2", "--eps", "0.3"]) == 0
    assert json.loads(capsys.readouterr().out)["region"] == "R >= 1, R0 >= 0"
