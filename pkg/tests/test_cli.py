"""CLI subcommands: exit codes, artifact files, reproducibility."""

from __future__ import annotations

from pacpredict.cli import main


def run(argv):
    return main(argv)


def test_validate_bundled_maze(capsys):
    assert run(["validate-maze", "--file", "bundled"]) == 0
    out = capsys.readouterr().out
    assert "deg2=143 deg3=32 deg4=7" in out
    assert "182" in out


def test_validate_broken_maze(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("####\n#PX#\n####\n")
    assert run(["validate-maze", "--file", str(bad)]) == 1
    assert "unknown glyph" in capsys.readouterr().err


def test_unknown_flag_exits_2():
    assert run(["eval", "--nonsense"]) == 2


def test_eval_missing_logs_exits_2(tmp_path):
    missing = tmp_path / "nope"
    assert run(["eval", "--model", "random", "--logs", str(missing)]) == 2


def test_eval_empty_dir_exits_2(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert run(["eval", "--model", "random", "--logs", str(empty)]) == 2


def test_simulate_then_eval(tmp_path, capsys):
    logs = tmp_path / "logs"
    out = tmp_path / "out"
    assert run(["simulate", "--policy", "random", "--games", "2",
                "--seed", "4", "--out", str(logs)]) == 0
    written = sorted(logs.glob("*.log"))
    assert len(written) == 2
    assert run(["eval", "--model", "random", "--logs", str(logs),
                "--out", str(out)]) == 0
    summary = (out / "eval_modelrandom_summary.csv").read_text()
    assert summary.startswith("# config_digest=")
    assert (out / "eval_modelrandom_timing.csv").exists()
    stdout = capsys.readouterr().out
    assert "accuracy=" in stdout


def test_simulate_rerun_identical_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for dest in (a, b):
        assert run(["simulate", "--policy", "greedy_pills", "--games", "1",
                    "--seed", "9", "--out", str(dest)]) == 0
    fa, fb = sorted(a.glob("*.log"))[0], sorted(b.glob("*.log"))[0]
    assert fa.read_bytes() == fb.read_bytes()


def test_eval_rerun_identical_bytes(tmp_path):
    logs = tmp_path / "logs"
    run(["simulate", "--policy", "random", "--games", "2", "--seed", "6",
         "--out", str(logs)])
    outs = []
    for name in ("o1", "o2"):
        out = tmp_path / name
        assert run(["eval", "--model", "2", "--logs", str(logs),
                    "--out", str(out)]) == 0
        outs.append((out / "eval_model2.csv").read_bytes())
    assert outs[0] == outs[1]


def test_correlate_from_fixture(tmp_path, capsys):
    report = tmp_path / "rows.csv"
    report.write_text(
        "game,accuracy,ms_mean\n0,1,2\n1,2,1\n2,3,3\n3,4,2\n")
    assert run(["correlate", "--report", str(report)]) == 0
    out = capsys.readouterr().out
    assert "r=0.3162" in out


def test_loo_cli_smoke(tmp_path, capsys):
    logs = tmp_path / "logs"
    out = tmp_path / "out"
    run(["simulate", "--policy", "random", "--games", "1", "--seed", "2",
         "--out", str(logs)])
    assert run(["loo", "--logs", str(logs), "--out", str(out)]) == 0
    loo_lines = (out / "loo.csv").read_text().splitlines()
    assert loo_lines[0].startswith("# config_digest=")
    assert len(loo_lines) == 2 + 22  # digest + header + 22 rows
    assert (out / "loo_timing.csv").exists()
