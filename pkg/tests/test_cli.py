import csv
import json
import pathlib
import subprocess
import sys

import pytest

from meshless_helm.cli import EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, fmt, main

CONFIGS = pathlib.Path(__file__).resolve().parents[1] / "configs"


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_fmt():
    assert fmt(1 / 3) == "0.3333333333"
    assert fmt(0.0) == "0"
    assert fmt(7) == "7"
    assert fmt(None) == ""
    assert fmt(1.23456789012345e-20) == "1.23456789e-20"


def test_solve_star(tmp_path, capsys):
    assert main(["solve", str(CONFIGS / "star_homogeneous.toml"), "--out", str(tmp_path)]) \
        == EXIT_OK
    rows = read_rows(tmp_path / "errors.csv")
    assert len(rows) == 153
    assert max(float(r["abs_error"]) for r in rows) <= 1e-5
    assert len(read_rows(tmp_path / "solution.csv")) == 153
    meta = json.loads((tmp_path / "run_meta.json").read_text())
    assert meta["command"] == "solve"
    assert len(meta["config_sha256"]) == 64
    assert "max_abs_error" in capsys.readouterr().out


def test_solve_is_byte_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    cfg = str(CONFIGS / "heat_laplace.toml")
    assert main(["solve", cfg, "--out", str(a)]) == EXIT_OK
    assert main(["solve", cfg, "--out", str(b), "--threads", "3"]) == EXIT_OK
    for name in ("solution.csv", "errors.csv"):
        data = (a / name).read_bytes()
        assert data == (b / name).read_bytes()
        assert b"\r" not in data


def test_solve_heat_against_series(tmp_path):
    assert main(["solve", str(CONFIGS / "heat_laplace.toml"), "--out", str(tmp_path)]) == EXIT_OK
    rows = read_rows(tmp_path / "errors.csv")
    centre = [r for r in rows if (r["x"], r["y"]) == ("-0.01", "0.01")]
    assert len(centre) == 1
    assert float(centre[0]["abs_error"]) <= 0.05


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text((CONFIGS / "star_homogeneous.toml").read_text()
                   .replace("n_points = 30", "n_points = 0"))
    assert main(["solve", str(bad), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "mfs.n_points" in err
    assert f"{bad}:" in err


def test_solver_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "rank.toml"
    bad.write_text((CONFIGS / "star_homogeneous.toml").read_text()
                   .replace("n_points = 30", "n_points = 200"))
    assert main(["solve", str(bad), "--out", str(tmp_path / "o")]) == EXIT_SOLVER
    assert "rank deficient" in capsys.readouterr().err
    # a ridge makes the same problem solvable
    assert main(["solve", str(bad), "--out", str(tmp_path / "o"), "--reg", "1e-12"]) == EXIT_OK


def test_bad_arguments_exit_code(capsys):
    assert main(["bench", "5.9"]) == EXIT_CONFIG
    assert main(["bench", "5.1", "--M", "15"]) == EXIT_CONFIG
    assert main(["solve"]) == EXIT_CONFIG
    assert main(["weights", "7"]) == EXIT_CONFIG
    assert main(["solve", "x.toml", "--threads", "-1"]) == EXIT_CONFIG
    capsys.readouterr()


def test_bench_star_tables(tmp_path):
    assert main(["bench", "5.1", "--out", str(tmp_path)]) == EXIT_OK
    for name in ("t1", "t2", "t3", "t4"):
        rows = read_rows(tmp_path / f"{name}.csv")
        assert len(rows) == 9
        assert {r["row"] for r in rows} == {"5", "6", "7"}
        assert {r["column"] for r in rows} == {"30", "40", "50"}
        assert all(r["paper_value"] for r in rows)
        assert (tmp_path / f"{name}_plot.dat").read_text().startswith(f"# {name.upper()}:")
    meta = json.loads((tmp_path / "run_meta.json").read_text())
    assert meta["tables"] == ["t1.csv", "t2.csv", "t3.csv", "t4.csv"]
    t1 = read_rows(tmp_path / "t1.csv")
    assert float(next(r["paper_value"] for r in t1 if r["row"] == "5" and r["column"] == "30")) \
        == 5.7834e-08


def test_bench_selection(tmp_path):
    assert main(["bench", "5.7", "--M", "15", "--N", "157", "--out", str(tmp_path)]) == EXIT_OK
    assert sorted(p.name for p in tmp_path.glob("*.csv")) == ["t23.csv"]
    rows = read_rows(tmp_path / "t23.csv")
    assert len({r["row"] for r in rows}) == 6
    assert len({r["column"] for r in rows}) == 2


def test_bench_is_byte_deterministic(tmp_path):
    for d in ("a", "b"):
        assert main(["bench", "5.1", "--a", "5", "--out", str(tmp_path / d)]) == EXIT_OK
    for name in ("t1.csv", "t1_plot.dat"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_weights_command(capsys):
    assert main(["weights", "4", "--exact"]) == EXIT_OK
    assert capsys.readouterr().out.split("\n")[:4] == ["1 -2", "2 26", "3 -48", "4 24"]
    assert main(["weights", "2"]) == EXIT_OK
    assert capsys.readouterr().out == "1 2\n2 -2\n"


def test_thread_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("MESHLESS_HELM_THREADS", "two")
    cfg = str(CONFIGS / "heat_laplace.toml")
    assert main(["solve", cfg, "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "MESHLESS_HELM_THREADS" in capsys.readouterr().err
    # the flag takes precedence over the environment
    assert main(["solve", cfg, "--out", str(tmp_path), "--threads", "2"]) == EXIT_OK
    monkeypatch.setenv("MESHLESS_HELM_THREADS", "2")
    assert main(["solve", cfg, "--out", str(tmp_path)]) == EXIT_OK


def test_convention_flags(tmp_path):
    # the verbatim step coefficient k / tau changes the heat march result
    cfg = str(CONFIGS / "heat_steps.toml")
    assert main(["solve", cfg, "--out", str(tmp_path / "pde")]) == EXIT_OK
    assert main(["solve", cfg, "--out", str(tmp_path / "paper"),
                 "--lambda-convention", "paper"]) == EXIT_OK
    assert (tmp_path / "pde" / "solution.csv").read_bytes() != \
        (tmp_path / "paper" / "solution.csv").read_bytes()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "meshless_helm", "weights", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout == "1 2\n2 -2\n"
    proc = subprocess.run([sys.executable, "-m", "meshless_helm", "bench", "9.9"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 2
