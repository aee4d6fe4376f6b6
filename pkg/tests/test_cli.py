import json
import subprocess
import sys

import pytest

from holistic_fd.cli import (
    EXIT_IO,
    EXIT_NUMERIC,
    EXIT_SPEC,
    EXIT_UNSUPPORTED,
    EXIT_USAGE,
    parse_values,
    run,
)
from holistic_fd.coefficients import nu1_closed_form
from holistic_fd.model import ModelSeries

AD = "ut = -eps*ux + uxx"


def error_line(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1
    return json.loads(err[0])


def test_derive_fourth_order_json(tmp_path):
    out = tmp_path / "m.json"
    rep = tmp_path / "m.txt"
    assert run(["derive", "--pde", AD, "--gamma", "3", "--eps-order", "10",
                "--out", str(out), "--report", str(rep)]) == 0
    model = ModelSeries.from_json(out.read_text())
    assert (model.gamma_order, model.eps_order) == (3, 10)
    text = out.read_text()
    assert '"1/2395008"' in text or '"-1/2395008"' in text
    assert '"1/1900800"' in text or '"-1/1900800"' in text
    assert "γ²ε⁷" in rep.read_text()


def test_derive_degenerate(capsys):
    assert run(["derive", "--pde", "ut = uxx", "--gamma", "1", "--format", "text"]) == 0
    assert capsys.readouterr().out == "u̇_j = 0 + O(γ)\n"


def test_coefficients_closed_form_column(tmp_path):
    out = tmp_path / "nu1.csv"
    assert run(["coefficients", "--which", "nu1", "--z", "0:8:0.25", "--shanks", "3",
                "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 34
    for row in rows[1:]:
        z, _, acc, closed, _ = (float(x) for x in row.split(","))
        assert closed == pytest.approx(nu1_closed_form(z), rel=1e-12)
        if z <= 6:
            assert acc == pytest.approx(closed, rel=2e-3)


def test_equivalent_reports_consistency(capsys):
    assert run(["equivalent", "--pde", AD, "--gamma", "2", "--eps-order", "3",
                "--max-h", "2"]) == 0
    cap = capsys.readouterr()
    assert "4,0,2,1/12" in cap.out.splitlines()
    assert cap.err.strip() == "consistency_order=2"


def test_equivalent_from_model_file(tmp_path, capsys):
    path = tmp_path / "m.json"
    run(["derive", "--pde", AD, "--gamma", "2", "--eps-order", "3", "--out", str(path)])
    capsys.readouterr()
    assert run(["equivalent", "--model-file", str(path), "--max-h", "2", "--format", "text"]) == 0
    assert capsys.readouterr().out.startswith("u_t = 1*d2u - 1*eps*d1u")


def test_simulate_writes_both_files(tmp_path):
    traj, mom = tmp_path / "t.csv", tmp_path / "m.csv"
    assert run(["simulate", "--model", "back", "--eps", "5", "--h", "1", "--T", "2",
                "--trajectory", str(traj), "--moments", str(mom)]) == 0
    last = mom.read_text().splitlines()[-1].split(",")
    assert float(last[2]) == pytest.approx(10, abs=1e-6)
    assert float(last[3]) == pytest.approx(4, abs=1e-6)
    assert traj.read_text().startswith("t,j,u_j\n")


def test_stability_csv(capsys):
    assert run(["stability", "--model", "back", "--z", "0.5,1,2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "eps_h,max_growth,stable"
    assert [line.split(",")[2] for line in lines[1:]] == ["0", "1", "1"]


@pytest.mark.parametrize(
    "argv,code,kind",
    [
        (["derive", "--pde", "ut = u_xx", "--gamma", "2"], EXIT_SPEC, "malformed_spec"),
        (["derive", "--pde", "ut = uxxx", "--gamma", "2"], EXIT_UNSUPPORTED, "unsupported_pde"),
        (["derive", "--pde", AD], EXIT_USAGE, "usage"),
        (["frobnicate"], EXIT_USAGE, "usage"),
        (["simulate", "--model-file", "/nonexistent/m.json", "--eps", "1", "--T", "1",
          "--moments", "x.csv"], EXIT_IO, "io_error"),
        (["simulate", "--model", "back", "--eps", "5", "--T", "1", "--dt", "1", "--strict",
          "--moments", "x.csv"], EXIT_NUMERIC, "numerical_failure"),
        (["stability", "--model", "back", "--z", "1:0:0.1"], EXIT_SPEC, "malformed_spec"),
        (["coefficients", "--which", "nu1", "--z", "1", "--shanks", "3", "--eps-order", "4"],
         EXIT_USAGE, "usage"),
    ],
)
def test_error_exit_codes(argv, code, kind, capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(argv) == code
    err = error_line(capsys)
    assert err["error"] == kind and err["exit"] == code


def test_value_lists():
    assert parse_values("0:1:0.25") == [0, 0.25, 0.5, 0.75, 1]
    assert parse_values("0:0.3:0.1") == pytest.approx([0, 0.1, 0.2, 0.3])
    assert parse_values("0.5,2,6") == [0.5, 2, 6]


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "holistic_fd", "derive", "--pde", "ut = uxx", "--gamma", "2",
         "--format", "text"],
        capture_output=True, text=True, check=True,
    )
    assert "γ·(1/h²)·δ²" in proc.stdout


def test_thread_cap_does_not_change_output(tmp_path, monkeypatch):
    args = ["coefficients", "--which", "kappa2", "--z", "0.5:8:0.5", "--shanks", "2"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(args + ["--out", str(a)])
    monkeypatch.setenv("HOLISTIC_FD_THREADS", "3")
    run(args + ["--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
