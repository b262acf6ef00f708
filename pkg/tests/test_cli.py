"""Tests for the command line."""
import csv
import json

import numpy as np
import pytest

from saddle_rotor import cli
from saddle_rotor.const import (CMD_DIAGONALIZE, CMD_RICCATI, CMD_STOKES,
                                CMD_VERIFY, ENV_MAX_N, HISTORY_HEADER,
                                SPECTRUM_HEADER)
from saddle_rotor.matrix_io import read_matrix

from .conftest import CANONICAL_X


def run_json(capsys, argv):
    """Run the CLI and decode stdout."""
    code = cli.main(["-q"] + argv)
    return code, json.loads(capsys.readouterr().out)


def test_parser_subcommands():
    parser = cli.build_parser()
    commands = next(action for action in parser._actions  # pylint: disable=protected-access
                    if action.dest == "command")
    assert set(commands.choices) == {
        CMD_DIAGONALIZE, CMD_RICCATI, CMD_STOKES, CMD_VERIFY
    }


def test_diagonalize_canonical(capsys, config_dir):
    code, data = run_json(
        capsys, ["diagonalize", str(config_dir / "canonical.json")])
    assert code == 0
    assert data["normX"] == pytest.approx(CANONICAL_X, abs=1e-12)
    assert data["offDiagResidual"] <= 1e-12
    assert data["passed"]


def test_diagonalize_outputs(tmp_path, config_dir):
    out = tmp_path / "report.json"
    u_out = tmp_path / "u.mtx"
    code = cli.main([
        "-q", "diagonalize",
        str(config_dir / "golden.json"), "--out",
        str(out), "--u-out",
        str(u_out), "--bhat-out",
        str(tmp_path / "bhat.mtx")
    ])
    assert code == 0
    assert json.loads(out.read_text(encoding="utf-8"))["passed"]
    assert read_matrix(u_out).shape == (2, 2)
    assert read_matrix(tmp_path / "bhat.mtx").shape == (2, 2)


def test_diagonalize_is_deterministic(tmp_path, config_dir):
    texts = []
    for name in ("a.json", "b.json"):
        cli.main([
            "-q", "diagonalize",
            str(config_dir / "coupled.json"), "--no-timings", "--out",
            str(tmp_path / name)
        ])
        texts.append((tmp_path / name).read_text(encoding="utf-8"))
    assert texts[0] == texts[1]


def test_diagonalize_uncoupled_gives_identity(tmp_path):
    problem = tmp_path / "p.json"
    problem.write_text(json.dumps({
        "a_plus": [[2.0]],
        "a_minus": [[1.0]],
        "w": [[0.0]]
    }),
                       encoding="utf-8")
    u_out = tmp_path / "u.mtx"
    code = cli.main([
        "-q", "diagonalize",
        str(problem), "--u-out",
        str(u_out), "--out",
        str(tmp_path / "r.json")
    ])
    assert code == 0
    assert read_matrix(u_out) == pytest.approx(np.eye(2), abs=1e-15)


def test_diagonalize_asymmetric_exits_2(tmp_path, caplog):
    problem = tmp_path / "p.json"
    problem.write_text(json.dumps({
        "a_plus": [[1.0, 2.0], [0.0, 1.0]],
        "a_minus": [[1.0]],
        "w": [[1.0, 1.0]]
    }),
                       encoding="utf-8")
    assert cli.main(["-q", "diagonalize", str(problem)]) == 2
    assert "a_plus" in caplog.text


def test_diagonalize_ragged_block_exits_2(tmp_path, caplog):
    problem = tmp_path / "p.json"
    problem.write_text(json.dumps({
        "a_plus": [[1.0, 0.0], [0.0]],
        "a_minus": [[1.0]],
        "w": [[1.0, 1.0]]
    }),
                       encoding="utf-8")
    assert cli.main(["-q", "diagonalize", str(problem)]) == 2
    assert "ProblemFileError: a_plus" in caplog.text
    assert "Invalid argument" not in caplog.text


def test_riccati_scalar(tmp_path, capsys, config_dir):
    history = tmp_path / "history.csv"
    code, data = run_json(capsys, [
        "riccati",
        str(config_dir / "canonical.json"), "--csv",
        str(history)
    ])
    assert code == 0
    assert data["converged"]
    assert data["finalResidual"] <= 1.5e-10
    with open(history, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    assert tuple(rows[0]) == HISTORY_HEADER


def test_riccati_undamped_does_not_converge(tmp_path, capsys, config_dir):
    history = tmp_path / "history.csv"
    code, data = run_json(capsys, [
        "riccati",
        str(config_dir / "canonical.json"), "--damping", "1.0", "--max-iter",
        "10", "--csv",
        str(history)
    ])
    assert code == 3
    assert not data["converged"]
    with open(history, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))[1:]
    distances = [float(row[2]) for row in rows]
    assert distances[0] == pytest.approx(distances[2])
    assert distances[1] == pytest.approx(distances[3])


def test_riccati_singular_a_plus(config_dir, caplog):
    assert cli.main(["-q", "riccati", str(config_dir / "kernel.json")]) == 3
    assert "A+ > 0" in caplog.text


def test_stokes_small(tmp_path, capsys):
    spectrum = tmp_path / "spectrum.csv"
    code, data = run_json(capsys, [
        "stokes", "--n", "6", "--k-range", "2:20", "--csv",
        str(spectrum), "--sweep", "0,0.5,1"
    ])
    assert code == 0
    assert data["passed"]
    assert data["kernelDims"] == [0, 1]
    assert data["normX"] <= data["bound"] + 1e-8
    assert len(data["sweep"]) == 3
    with open(spectrum, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    assert tuple(rows[0]) == SPECTRUM_HEADER
    assert len(rows) == 37


def test_stokes_reports_failed_decay_fit(capsys, caplog):
    # n=6 is too coarse for the Weyl law over k=2:20
    code, data = run_json(capsys, ["stokes", "--n", "6", "--k-range", "2:20"])
    assert code == 0
    assert data["passed"]
    assert data["decayPassed"] is False
    assert data["weylSlope"] < 0.9
    assert "Decay fit" in caplog.text


def test_stokes_no_coupling(capsys):
    code, data = run_json(capsys, ["stokes", "--n", "4", "--vstar", "0"])
    assert code == 0
    assert data["normX"] <= 1e-12


def test_stokes_rejects_n1(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["stokes", "--n", "1"])
    assert info.value.code == 2
    assert "at least 2" in capsys.readouterr().err


def test_stokes_respects_grid_cap(monkeypatch):
    monkeypatch.setenv(ENV_MAX_N, "5")
    assert cli.main(["-q", "stokes", "--n", "6"]) == 2


def test_verify_command(capsys):
    code, data = run_json(capsys, ["verify", "--cases", "3", "--nmax", "8"])
    assert code == 0
    assert data["passed"]
    code, data = run_json(capsys, ["verify", "--cases", "0"])
    assert code == 0
    assert data["vacuous"]


def test_verify_printed_sign_exits_4(capsys):
    code, data = run_json(
        capsys, ["verify", "--cases", "3", "--nmax", "8", "--printed-sign"])
    assert code == 4
    assert not data["passed"]


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["--version"])
    assert info.value.code == 0
    assert "saddle_rotor" in capsys.readouterr().out
