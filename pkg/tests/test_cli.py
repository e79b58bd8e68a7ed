import hashlib
from pathlib import Path

import pytest

from esgbench.cli import main

GEN_ARGS = [
    "--seed", "7", "--stocks", "6", "--sectors", "2", "--news", "50",
    "--days", "4", "--bars-per-day", "2", "--esg-fraction", "0.4",
]


def dataset_dir(tmp_path: Path) -> Path:
    out = tmp_path / "ds"
    assert main(["gen", *GEN_ARGS, "--out", str(out)]) == 0
    return out


def file_hashes(directory: Path) -> list[str]:
    return [hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(directory.iterdir())]


def test_gen_is_deterministic_across_runs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["gen", *GEN_ARGS, "--out", str(a)]) == 0
    assert main(["gen", *GEN_ARGS, "--out", str(b)]) == 0
    assert file_hashes(a) == file_hashes(b)


def test_gen_seed_changes_output(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["gen", *GEN_ARGS, "--out", str(a)]) == 0
    args = list(GEN_ARGS)
    args[1] = "8"
    assert main(["gen", *args, "--out", str(b)]) == 0
    assert file_hashes(a) != file_hashes(b)


def test_ingest_prints_accepted_counts(tmp_path, capsys):
    data = dataset_dir(tmp_path)
    capsys.readouterr()
    assert main(["ingest", "--data", str(data)]) == 0
    out = capsys.readouterr().out
    assert "accepted: 6 stocks, 2 sectors, 50 news, 48 bars" in out
    assert "rejected: 0" in out


def test_verify_on_pristine_dataset_exits_zero(tmp_path, capsys):
    data = dataset_dir(tmp_path)
    assert main(["verify", "--data", str(data)]) == 0
    out = capsys.readouterr().out
    assert out.count("equivalent") == 3


def test_verify_exits_one_on_divergence(tmp_path, monkeypatch, capsys):
    from esgbench.engines.graph import GraphEngine

    data = dataset_dir(tmp_path)
    original = GraphEngine._join_rows
    monkeypatch.setattr(GraphEngine, "_join_rows", lambda self, hits, offsets: original(self, hits, offsets)[1:])
    assert main(["verify", "--data", str(data)]) == 1
    assert "DIVERGED" in capsys.readouterr().out


def test_bench_writes_full_report(tmp_path, capsys):
    data = dataset_dir(tmp_path)
    out = tmp_path / "report"
    code = main(["bench", "--data", str(data), "--engines", "graph", "--reps", "5", "--warmups", "1", "--out", str(out)])
    assert code == 0
    csv_lines = (out / "bench.csv").read_text().splitlines()
    # header + 1 load row + 5 queries x 5 metrics
    assert len(csv_lines) == 1 + 1 + 25
    assert (out / "bench.md").exists()
    assert (out / "median_wall_ms.tsv").exists()


def test_bench_refuses_to_run_when_engines_diverge(tmp_path, monkeypatch, capsys):
    from esgbench.engines.graph import GraphEngine

    data = dataset_dir(tmp_path)
    original = GraphEngine._join_rows
    monkeypatch.setattr(GraphEngine, "_join_rows", lambda self, hits, offsets: original(self, hits, offsets)[1:])
    out = tmp_path / "report"
    assert main(["bench", "--data", str(data), "--reps", "1", "--out", str(out)]) == 1
    assert "refusing to benchmark" in capsys.readouterr().out
    assert not (out / "bench.csv").exists()
    # --force overrides the gate
    assert main(["bench", "--data", str(data), "--reps", "1", "--warmups", "0", "--out", str(out), "--force"]) == 0
    assert (out / "bench.csv").exists()


def test_query_prints_hit_rows(tmp_path, capsys):
    data = dataset_dir(tmp_path)
    capsys.readouterr()
    assert main(["query", "--data", str(data), "--engine", "graph", "--query", "Q1", "--k", "3"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("stock\tdate\tmedia\tscore")
    assert "# " in out.splitlines()[-1]


def test_query_prints_bar_rows(tmp_path, capsys):
    data = dataset_dir(tmp_path)
    capsys.readouterr()
    assert main(["query", "--data", str(data), "--engine", "relational", "--query", "Q2"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("symbol\ttimestamp\topen\thigh\tlow\tclose\tvolume")


def test_report_rerenders_from_csv(tmp_path):
    data = dataset_dir(tmp_path)
    out = tmp_path / "report"
    assert main(["bench", "--data", str(data), "--engines", "graph", "--reps", "2", "--warmups", "0", "--out", str(out)]) == 0
    rerender = tmp_path / "rerender"
    assert main(["report", "--csv", str(out / "bench.csv"), "--out", str(rerender)]) == 0
    first = (rerender / "bench.csv").read_text().splitlines()
    second = (out / "bench.csv").read_text().splitlines()
    assert sorted(first) == sorted(second)


def test_unknown_subcommand_exits_with_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_generated_and_loaded_datasets_agree(tmp_path, capsys):
    data = dataset_dir(tmp_path)
    assert main(["verify", *GEN_ARGS]) == 0  # same config, generated in-process
    assert main(["verify", "--data", str(data)]) == 0


def test_gen_rejects_bad_config(tmp_path, capsys):
    assert main(["gen", "--stocks", "2", "--sectors", "5", "--out", str(tmp_path / "x")]) == 1
    assert "error:" in capsys.readouterr().err
