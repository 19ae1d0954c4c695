import numpy as np
import pytest
from scipy import stats

from hyperdismantle import graph
from hyperdismantle.baselines import Strategy
from hyperdismantle.config import GenConfig, SirConfig, TrainConfig
from hyperdismantle.dismantling import anc, dismantle, mean_anc
from hyperdismantle.synthgen import generate_batch
from hyperdismantle.training import train, validation_set
from hyperdismantle.types import State

pytestmark = pytest.mark.anyio


async def test_eval_pipeline_on_files(tmp_path) -> None:
    path = tmp_path / "g.txt"
    path.write_text("0 1 2\n2 3\n")
    res = await graph.ainvoke(
        State(datasets=[str(path)], strategies=["hhda", "HD", "CI"]),
        context={"mode": "eval", "batch_frac": 0.25},
    )
    assert [list(row) for row in res["table"]] == [["dataset", "HHDA", "HD", "CI"]]
    assert res["table"][0]["HHDA"] == pytest.approx(0.25)
    assert [r["index"] for r in sorted(res["results"], key=lambda r: r["index"])] == [0, 1, 2]
    assert str(path) in res["input_digests"]


async def test_eval_pipeline_matches_direct_dismantling() -> None:
    cfg = GenConfig(n_min=10, n_max=20, seed=6)
    res = await graph.ainvoke(
        State(strategies=["HDA", "RANDOM"]),
        context={"mode": "eval", "synthetic": 4, "gen_config": cfg, "batch_frac": 0.1, "seed": 2},
    )
    instances = generate_batch(cfg, 4)
    row = res["table"][0]
    assert row["dataset"] == "synthetic"
    for name in ("HDA", "RANDOM"):
        expected = np.mean([anc(dismantle(G, Strategy(name, seed=2), 0.1)) for G in instances])
        assert row[name] == pytest.approx(expected)


async def test_sir_pipeline(tmp_path) -> None:
    path = tmp_path / "contacts.txt"
    path.write_text("1 0 1 2\n2 2 3\n3 3 4 5\n4 5 0\n")
    sir = SirConfig(beta=0.4, mu=0.5, repetitions=8, immune_ratios=(0.0, 0.5))
    res = await graph.ainvoke(
        State(datasets=[str(path)], strategies=["HHD", "HHDA"]),
        context={"mode": "sir", "dataset_format": "contact-timestamps", "sir_config": sir},
    )
    rows = res["table"]
    assert [row["strategy"] for row in rows] == ["HHD", "HHDA"]
    assert rows[0]["0.00"] == rows[1]["0.00"]
    assert all(0.0 <= row[key] <= 1.0 for row in rows for key in ("0.00", "0.50"))
    assert set(rows[0]) == {"strategy", "0.00", "0.50", "se_0.00", "se_0.50"}


@pytest.mark.slow
@pytest.mark.parametrize("baseline", ["HHD", "HD"])
async def test_adaptive_hyper_degree_beats_static_baselines(baseline: str) -> None:
    instances = generate_batch(GenConfig(), 50)
    adaptive = [anc(dismantle(G, Strategy("HHDA"))) for G in instances]
    static = [anc(dismantle(G, Strategy(baseline))) for G in instances]  # type: ignore[arg-type]
    assert np.mean(adaptive) <= np.mean(static)
    assert stats.wilcoxon(static, adaptive, alternative="greater").pvalue < 0.05


@pytest.mark.slow
async def test_immunization_contains_the_epidemic() -> None:
    cfg = GenConfig(n_min=200, n_max=200, seed=3)
    sir = SirConfig(repetitions=100, immune_ratios=(0.0, 0.05, 0.10, 0.15, 0.20))
    res = await graph.ainvoke(
        State(strategies=["HHDA", "RANDOM"]),
        context={"mode": "sir", "synthetic": 1, "gen_config": cfg, "sir_config": sir},
    )
    rows = {row["strategy"]: row for row in res["table"]}
    hhda = rows["HHDA"]
    ratios = ["0.00", "0.05", "0.10", "0.15", "0.20"]
    for low, high in zip(ratios, ratios[1:]):
        assert hhda[high] <= hhda[low] + 2 * max(hhda[f"se_{high}"], hhda[f"se_{low}"])
    assert hhda["0.00"] == rows["RANDOM"]["0.00"]


@pytest.mark.slow
def test_scaled_down_training_beats_initial_and_random() -> None:
    cfg = TrainConfig(episodes=800, warmup=100, embed_dim=16, layers=2, batch_size=32, validation_size=20)
    gen_cfg = GenConfig(n_min=20, n_max=30)
    result = train(cfg, gen_cfg)
    held_out = validation_set(cfg, gen_cfg)
    random_anc = mean_anc(held_out, Strategy("RANDOM", seed=cfg.seed), cfg.validation_batch_frac)
    assert result.updates > 0
    assert result.best_anc < result.initial_anc
    assert result.best_anc < random_anc
