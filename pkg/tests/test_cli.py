import argparse
import hashlib
import json
import subprocess
import sys

import numpy as np
import pytest

from ptcoms import cli
from ptcoms.params import dump_config, paper_defaults
from ptcoms.report import config_hash


def run(tmp_path, *argv):
    return cli.main([*argv, "--out", str(tmp_path)])


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def read_csv(path):
    lines = path.read_text().splitlines()
    names = lines[1].split(",")
    rows = [line.split(",") for line in lines[2:]]
    return lines[0], names, rows


def test_quantity_parsing():
    assert cli.parse_quantity("0.1pW", "W") == pytest.approx(1e-13)
    assert cli.parse_quantity("3mA", "A") == pytest.approx(3e-3)
    assert cli.parse_quantity("2.5e-11", "T") == 2.5e-11
    with pytest.raises(argparse.ArgumentTypeError):
        cli.parse_quantity("3 furlongs", "A")


def test_grid_parsing():
    assert cli.parse_grid("0:1:5").tolist() == [0, 0.25, 0.5, 0.75, 1]
    assert cli.parse_grid("0.1,0.2").tolist() == [0.1, 0.2]


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(a, "imax", "--j-over-kappa", "0.5") == 0
    assert run(b, "imax", "--j-over-kappa", "0.5") == 0
    assert digest(a / "imax.csv") == digest(b / "imax.csv")


def test_header_carries_config_hash(tmp_path):
    assert run(tmp_path, "spectrum") == 0
    header, names, rows = read_csv(tmp_path / "spectrum.csv")
    assert header.startswith("# ptcoms spectrum")
    assert f"config_sha256={config_hash(paper_defaults())}" in header
    assert names[:2] == ["omega_over_omega_m", "i_fwm"]
    assert len(rows) == 2001
    manifest = json.loads((tmp_path / "spectrum.manifest.json").read_text())
    assert manifest["config_hash"] == config_hash(paper_defaults())
    assert manifest["deterministic"] is True


def test_usage_errors_exit_two(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["nonsense"])
    assert info.value.code == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("not_a_parameter = 1\n")
    assert run(tmp_path, "spectrum", "--config", str(bad)) == 2
    assert "not_a_parameter" in capsys.readouterr().err


def test_physics_failure_exits_one(tmp_path, capsys):
    assert run(tmp_path, "sensitivity", "--threshold", "2") == 1
    assert "OutOfRangeError" in capsys.readouterr().err


def test_validate_passes(tmp_path, capsys):
    assert run(tmp_path, "validate", "--j-over-kappa", "0.5") == 0
    assert "PASS" in capsys.readouterr().out
    payload = json.loads((tmp_path / "validate.json").read_text())
    assert payload["max_rel_dev"] < 0.01


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "p.cfg"
    cfg.write_text(dump_config(paper_defaults().replace(P_d=5e-12, B=3e-11)))
    args = cli.build_parser().parse_args(["spectrum", "--config", str(cfg), "--pd", "0.1pW"])
    params = cli.resolve_params(args)
    assert params.P_d == pytest.approx(1e-13)
    assert params.B == 3e-11
    assert params.kappa_a == paper_defaults().kappa_a


def test_contrast_command(tmp_path):
    code = run(tmp_path, "contrast", "--pd", "0.1pW", "--current", "3mA", "--j-over-kappa", "0.5")
    assert code == 0
    payload = json.loads((tmp_path / "contrast.json").read_text())
    assert payload["average_contrast"] == pytest.approx(0.122, abs=0.0015)


def test_reproduce_exceptional_point(tmp_path):
    assert run(tmp_path, "reproduce", "fig1") == 0
    _, names, rows = read_csv(tmp_path / "fig1.csv")
    table = {name: [row[i] for row in rows] for i, name in enumerate(names)}
    j = np.array(table["J_over_kappa"], float)
    k = int(np.argmin(np.abs(j - 0.5)))
    assert table["phase"][k] == "ExceptionalPoint"
    assert set(table["phase"][:k]) == {"Broken"} and set(table["phase"][k + 1 :]) == {"Unbroken"}


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "ptcoms", "eigen", "--j-grid", "0,0.5,1", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "eigen.csv").exists()
