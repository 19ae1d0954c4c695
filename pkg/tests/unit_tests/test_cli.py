import json

import pandas as pd
import pytest

from hyperdismantle.cli import EXIT_ERROR, EXIT_OK, main
from hyperdismantle.io import load_checkpoint


@pytest.fixture
def datasets(tmp_path):
    g = tmp_path / "g.txt"
    g.write_text("0 1 2\n2 3\n")
    star = tmp_path / "star.txt"
    star.write_text("# hub 10\n10 11\n10 12\n10 13\n10 14\n")
    return g, star


def test_gen_is_reproducible(tmp_path) -> None:
    args = ["gen", "--count", "3", "--n-min", "5", "--n-max", "9", "--seed", "4", "--quiet"]
    assert main(args + ["--out-dir", str(tmp_path / "a")]) == EXIT_OK
    assert main(args + ["--out-dir", str(tmp_path / "b")]) == EXIT_OK
    for i in range(3):
        name = f"hypernetwork_{i:04d}.txt"
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["command"] == "gen"
    assert manifest["seed"] == 4
    assert len(manifest["outputs"]) == 3


def test_dismantle_writes_trace_and_summary(tmp_path, datasets) -> None:
    g, _ = datasets
    out = tmp_path / "trace.csv"
    assert main(["dismantle", str(g), "--strategy", "hhda", "--batch-frac", "0.25", "--out", str(out)]) == EXIT_OK
    assert out.read_text() == (
        "step,removed,connectivity\n"
        "1,2,0.500000\n"
        "2,0,0.250000\n"
        "3,1,0.250000\n"
        "4,3,0.000000\n"
    )
    summary = tmp_path / "trace_summary.csv"
    assert summary.read_text() == "dataset,strategy,batches,anc\ng,HHDA,4,0.250000\n"
    manifest = json.loads(out.with_suffix(".manifest.json").read_text())
    assert str(g) in manifest["input_digests"]


def test_dismantle_reports_original_ids(tmp_path, datasets) -> None:
    _, star = datasets
    out = tmp_path / "trace.csv"
    args = ["dismantle", str(star), "--strategy", "HD", "--batch-frac", "0.2", "--budget", "2", "--gcc"]
    assert main(args + ["--out", str(out)]) == EXIT_OK
    frame = pd.read_csv(out, dtype={"removed": str})
    assert frame["removed"].tolist() == ["10", "11"]
    ids = pd.read_csv(tmp_path / "trace_ids.csv")
    assert ids["original"].tolist() == [10, 11, 12, 13, 14]


def test_dismantle_is_byte_identical_across_runs(tmp_path, datasets) -> None:
    _, star = datasets
    outputs = []
    for name in ("first.csv", "second.csv"):
        out = tmp_path / name
        assert main(["dismantle", str(star), "--strategy", "random", "--seed", "9", "--out", str(out)]) == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def test_agent_without_checkpoint_is_a_usage_error(tmp_path, datasets) -> None:
    g, _ = datasets
    with pytest.raises(SystemExit) as info:
        main(["dismantle", str(g), "--strategy", "agent", "--out", str(tmp_path / "t.csv")])
    assert info.value.code == 2


def test_library_errors_exit_with_code(tmp_path, capsys) -> None:
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n1 two\n")
    assert main(["dismantle", str(bad), "--strategy", "HD", "--out", str(tmp_path / "t.csv")]) == EXIT_ERROR
    assert capsys.readouterr().err.startswith("error: malformed-line: line 2")
    assert main(["eval", str(bad), "--strategies", "NOPE", "--out", str(tmp_path / "e.csv")]) == EXIT_ERROR


def test_eval_table(tmp_path, datasets) -> None:
    g, star = datasets
    out = tmp_path / "anc.csv"
    args = ["eval", str(g), str(star), "--strategies", "HD,HHDA", "--batch-frac", "0.25", "--threads", "2"]
    assert main(args + ["--out", str(out)]) == EXIT_OK
    assert out.read_text() == "dataset,HD,HHDA\ng,0.250000,0.250000\nstar,0.133333,0.133333\n"


def test_eval_with_synthetic_instances(tmp_path) -> None:
    out = tmp_path / "anc.csv"
    args = ["eval", "--synthetic", "3", "--n-min", "6", "--n-max", "10", "--strategies", "HDA,CI"]
    assert main(args + ["--batch-frac", "0.2", "--out", str(out)]) == EXIT_OK
    frame = pd.read_csv(out)
    assert frame.columns.tolist() == ["dataset", "HDA", "CI"]
    assert frame["dataset"].tolist() == ["synthetic"]
    assert ((frame[["HDA", "CI"]] >= 0.0) & (frame[["HDA", "CI"]] <= 1.0)).all().all()


def test_sir_table(tmp_path) -> None:
    contacts = tmp_path / "contacts.txt"
    contacts.write_text("5 1 2 3\n1 3 4\n2 4 5 6\n3 6 7\n4 7 1\n")
    out = tmp_path / "sir.csv"
    args = ["sir", str(contacts), "--strategies", "HD,HHDA", "--repetitions", "5", "--immune-ratios", "0,0.25"]
    assert main(args + ["--beta", "0.5", "--mu", "0.5", "--out", str(out)]) == EXIT_OK
    frame = pd.read_csv(out)
    assert frame.columns.tolist() == ["strategy", "0.00", "0.25", "se_0.00", "se_0.25"]
    assert frame["strategy"].tolist() == ["HD", "HHDA"]
    assert frame["0.00"].iloc[0] == frame["0.00"].iloc[1]


def test_stats_table(tmp_path, datasets) -> None:
    g, star = datasets
    out = tmp_path / "stats.csv"
    assert main(["stats", str(g), str(star), "--out", str(out)]) == EXIT_OK
    frame = pd.read_csv(out)
    assert frame["dataset"].tolist() == ["g", "star"]
    assert frame["nodes"].tolist() == [4, 5]
    assert frame["hyperedges"].tolist() == [2, 4]


def test_train_then_dismantle_with_agent(tmp_path, datasets) -> None:
    g, _ = datasets
    ckpt = tmp_path / "agent.json"
    curve = tmp_path / "curve.csv"
    args = [
        "train",
        "--episodes", "3",
        "--warmup", "1",
        "--embed-dim", "4",
        "--layers", "1",
        "--batch-size", "2",
        "--validation-interval", "1",
        "--validation-size", "2",
        "--n-min", "4",
        "--n-max", "6",
        "--quiet",
    ]
    assert main(args + ["--checkpoint", str(ckpt), "--curve", str(curve)]) == EXIT_OK
    assert load_checkpoint(ckpt).dims == (1, 4)
    assert pd.read_csv(curve)["episode"].tolist() == [1, 2, 3]

    out = tmp_path / "agent_trace.csv"
    assert main(["dismantle", str(g), "--strategy", "agent", "--checkpoint", str(ckpt), "--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert frame["connectivity"].iloc[-1] == 0.0
