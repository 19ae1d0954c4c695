import pytest
from langgraph.pregel import Pregel

from hyperdismantle import __version__
from hyperdismantle.config import (
    EvalConfig,
    GenConfig,
    SirConfig,
    TrainConfig,
    load_config_file,
    resolve,
)
from hyperdismantle.errors import HyperDismantleError, InvalidConfigError
from hyperdismantle.graph import graph


def test_graph_compiles() -> None:
    assert isinstance(graph, Pregel)
    assert __version__


def test_defaults() -> None:
    cfg = TrainConfig()
    assert cfg.gamma == 0.99
    assert cfg.n_step == 5
    assert cfg.epsilon == 0.05
    assert cfg.termination == "fully-fragmented"
    assert SirConfig().immune_ratios == (0.0, 0.05, 0.10, 0.15, 0.20)
    assert EvalConfig().strategies == ("HD", "HDA", "HHD", "HHDA", "CI")


def test_flags_override_file_override_defaults() -> None:
    file_values = {"gamma": "0.5", "n_step": "3", "unknown_key": "x"}
    cfg = resolve(TrainConfig, file_values, {"gamma": 0.9, "n_step": None, "out": "ignored"})
    assert cfg.gamma == 0.9
    assert cfg.n_step == 3
    assert cfg.epsilon == 0.05


def test_config_file(tmp_path) -> None:
    path = tmp_path / "run.env"
    path.write_text("BETA=0.3\nIMMUNE_RATIOS=0,0.1,0.2\n# comment\nREPETITIONS=7\n")
    cfg = resolve(SirConfig, load_config_file(path), {})
    assert cfg.beta == 0.3
    assert cfg.immune_ratios == (0.0, 0.1, 0.2)
    assert cfg.repetitions == 7


def test_strategy_list_is_split_and_uppercased() -> None:
    cfg = resolve(EvalConfig, {}, {"strategies": "hd, hhda,CI"})
    assert cfg.strategies == ("HD", "HHDA", "CI")
    with pytest.raises(InvalidConfigError):
        EvalConfig(strategies=())


def test_invalid_values_raise_config_error() -> None:
    with pytest.raises(InvalidConfigError) as info:
        TrainConfig(epsilon=2.0)
    assert str(info.value).startswith("invalid-config:")
    assert isinstance(info.value, HyperDismantleError)
    with pytest.raises(InvalidConfigError):
        TrainConfig(termination="never")
    with pytest.raises(InvalidConfigError):
        EvalConfig(batch_frac=0.0)
    with pytest.raises(InvalidConfigError):
        GenConfig(extra_field=1)


def test_replace_revalidates() -> None:
    cfg = GenConfig(n_min=5, n_max=10)
    assert cfg.replace(n_max=6).n_max == 6
    with pytest.raises(InvalidConfigError):
        cfg.replace(n_max=4)
