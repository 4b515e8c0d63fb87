import csv
import subprocess
import sys

import pytest

from plastigen.cli import main


def test_run_stdout_matches_csv(tmp_path, capsys):
    out = tmp_path / "run.csv"
    code = main(["run", "--grammar", "fixed_plastic.bnf", "--strategy", "asocial", "--seed", "1",
                 "--population", "100", "--generations", "8", "--out", str(out)])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    with out.open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert 1 <= len(lines) <= 9
    assert lines == [f"{r['generation']},{r['best_fitness']}" for r in rows]


def test_run_uses_env_seed(tmp_path, capsys, monkeypatch):
    args = ["run", "--grammar", "variable_expansion", "--strategy", "social",
            "--population", "30", "--generations", "3", "--trials", "50"]
    monkeypatch.setenv("PLASTIGEN_SEED", "4")
    main(args + ["--out", str(tmp_path / "a.csv")])
    main(args + ["--seed", "4", "--out", str(tmp_path / "b.csv")])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_incompatible_grammar_exits_2(capsys):
    assert main(["run", "--strategy", "social", "--grammar", "fixed_nolearning.bnf"]) == 2
    assert "social" in capsys.readouterr().err


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["run", "--strategy", "social"])
    assert exc.value.code == 2


def test_runtime_error_exits_1(tmp_path, capsys):
    assert main(["report", "--in", str(tmp_path / "missing")]) == 1
    assert capsys.readouterr().err


def test_sweep_then_report(tmp_path):
    cfg = tmp_path / "tiny.cfg"
    cfg.write_text("treatments = asocial@fixed_plastic, tabulist@variable_expansion\n"
                   "replications = 2\npopulation_size = 30\ngenerations = 3\n"
                   "learning_trials = 50\nelites = 2\n")
    out = tmp_path / "res"
    assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    assert main(["report", "--in", str(out)]) == 0
    with (out / "summary.csv").open() as fh:
        assert len(list(csv.DictReader(fh))) == 2
    for k in (7, 8, 9, 10):
        assert (out / f"fig{k}.csv").read_text().startswith("series,x,y")


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "plastigen", "run", "--strategy", "nolearning",
                           "--grammar", "fixed_nolearning", "--population", "20",
                           "--generations", "2", "--out", str(tmp_path / "r.csv")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0].startswith("0,")
