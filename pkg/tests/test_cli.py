import json
import math
import os
import subprocess
import sys
from pathlib import Path

import pytest

from eikonal_lab import cli, io
from eikonal_lab.phase_space import SystemParams

FAST = {
    "blackbody": ["--omega", "0.5,2", "--T", "0.1,1,10"],
    "modulate": ["--field-points", "50"],
    "diffract": ["--points", "401"],
    "guide": ["--walkers", "4000", "--bins", "40", "--points", "401"],
    "evolve": ["--points", "96", "--engine", "both"],
    "wigner": ["--state", "eigen", "--points", "201"],
    "spin": ["--t", "3", "--trials", "5000", "--axis", "1,0,0"],
    "bell": ["--model", "sign", "--trials", "5000", "--scan-resolution", "30"],
}


def _run(sub, out, *extra):
    return cli.run([sub, *FAST.get(sub, []), "--out-dir", str(out), *extra])


def _data_files(out: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(out.iterdir()) if p.name != "manifest.json"}


def test_usage_errors_exit_2(tmp_path, capsys):
    assert cli.run([]) == 2
    assert cli.run(["nonsense"]) == 2
    assert cli.run(["bell", "--model", "nope"]) == 2
    assert cli.run(["bell", "--angles", "0,60", "--out-dir", str(tmp_path)]) == 2
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"no_such_key": 1}))
    assert cli.run(["bell", "--config", str(cfg), "--out-dir", str(tmp_path)]) == 2
    cfg.write_text(json.dumps({"trials": "many"}))
    assert cli.run(["bell", "--config", str(cfg), "--out-dir", str(tmp_path)]) == 2
    assert cli.run(["diffract", "--slits", "3", "--out-dir", str(tmp_path)]) == 2


def test_numeric_failure_exits_3(tmp_path):
    assert cli.run(["evolve", "--engine", "schrodinger", "--dt", "0.5", "--out-dir", str(tmp_path)]) == 3
    assert cli.run(["spin", "--B", "0,0,100", "--dt", "0.1", "--out-dir", str(tmp_path)]) == 3


def test_bell_qm_example(tmp_path):
    assert cli.run(["bell", "--model", "qm", "--angles", "0,60,120", "--out-dir", str(tmp_path)]) == 0
    s = io.read_json(tmp_path / "summary.json")
    assert s["lhs"] == pytest.approx(0.5) and s["rhs"] == pytest.approx(1.0)
    assert s["violated"] is True
    m = io.read_json(tmp_path / "manifest.json")
    assert m["files"]["summary.json"] == io.sha256(tmp_path / "summary.json")
    assert m["config"]["params"]["model"] == "qm"


def test_blackbody_example(tmp_path):
    assert cli.run(["blackbody", "--omega", "1", "--T", "1", "--out-dir", str(tmp_path)]) == 0
    header, rows = io.read_csv(tmp_path / "blackbody.csv")
    row = dict(zip(header, rows[0]))
    assert row["E_T_closed"] == pytest.approx(1 / (math.e - 1), rel=1e-15)
    assert row["rel_err"] <= 1e-6


@pytest.mark.parametrize("sub", sorted(cli.SUBCOMMANDS))
def test_every_subcommand_is_byte_reproducible(tmp_path, sub):
    assert _run(sub, tmp_path / "a", "--seed", "11") == 0
    assert _run(sub, tmp_path / "b", "--seed", "11") == 0
    a, b = _data_files(tmp_path / "a"), _data_files(tmp_path / "b")
    assert a and a == b
    ma, mb = io.read_json(tmp_path / "a" / "manifest.json"), io.read_json(tmp_path / "b" / "manifest.json")
    assert ma["files"] == mb["files"]


def test_seed_changes_stochastic_output(tmp_path):
    _run("bell", tmp_path / "a", "--seed", "1")
    _run("bell", tmp_path / "b", "--seed", "2")
    assert _data_files(tmp_path / "a") != _data_files(tmp_path / "b")


def test_config_then_flags_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"model": "sign", "trials": 1000, "angles": [0, 45, 90], "seed": 4}))
    assert cli.run(["bell", "--config", str(cfg), "--trials", "2000", "--out-dir", str(tmp_path / "o")]) == 0
    c = io.read_json(tmp_path / "o" / "manifest.json")["config"]
    assert c["params"]["model"] == "sign" and c["params"]["trials"] == 2000
    assert c["params"]["angles"] == [0.0, 45.0, 90.0] and c["seed"] == 4


def test_manifest_config_replays_identically(tmp_path):
    assert _run("guide", tmp_path / "a", "--seed", "3") == 0
    m = io.read_json(tmp_path / "a" / "manifest.json")
    replay = dict(m["config"], out_dir=str(tmp_path / "b"))
    (tmp_path / "replay.json").write_text(json.dumps(replay))
    assert cli.run(["guide", "--config", str(tmp_path / "replay.json")]) == 0
    assert _data_files(tmp_path / "a") == _data_files(tmp_path / "b")
    assert cli.run(["bell", "--config", str(tmp_path / "replay.json")]) == 2


def test_formats(tmp_path):
    assert _run("blackbody", tmp_path / "j", "--format", "json") == 0
    cols, rows = io.read_table(tmp_path / "j" / "blackbody.json")
    assert cols[0] == "omega" and len(rows) == 6
    assert _run("blackbody", tmp_path / "s", "--format", "svg") == 0
    assert (tmp_path / "s" / "blackbody.svg").read_text().startswith("<svg")
    assert (tmp_path / "s" / "blackbody.csv").exists()


def test_env_var_sets_default_out_dir(tmp_path):
    ns = cli.build_parser().parse_args(["bell"])
    assert cli.resolve_config(ns, {"EIKONAL_LAB_OUT": str(tmp_path / "env")}).out_dir == str(tmp_path / "env")
    assert cli.resolve_config(ns, {}).out_dir == cli.DEFAULT_OUT
    ns = cli.build_parser().parse_args(["bell", "--out-dir", "x"])
    assert cli.resolve_config(ns, {"EIKONAL_LAB_OUT": "y"}).out_dir == "x"


def test_evolve_outputs_load_back(tmp_path):
    assert _run("evolve", tmp_path) == 0
    psi, sys_ = io.load_wavefunction(tmp_path / "wavefunction.csv")
    rho, _ = io.load_density(tmp_path / "density.csv")
    assert sys_ == SystemParams() and abs(psi.norm - 1) < 1e-8 and abs(rho.norm - 1) < 1e-6
    rep = io.read_json(tmp_path / "report.json")
    assert rep["correspondence"]["l1"] <= 1e-3


def test_module_entry_point(tmp_path):
    env = dict(os.environ, EIKONAL_LAB_OUT=str(tmp_path))
    res = subprocess.run([sys.executable, "-m", "eikonal_lab", "bell"], capture_output=True, text=True, env=env)
    assert res.returncode == 0, res.stderr
    assert json.loads(res.stdout)["violated"] is True
    assert (tmp_path / "manifest.json").exists()


def test_aliased_wigner_grid_is_a_usage_error(tmp_path):
    assert cli.run(["wigner", "--state", "eigen", "--points", "65", "--out-dir", str(tmp_path)]) == 2
