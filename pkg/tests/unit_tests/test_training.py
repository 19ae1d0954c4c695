import numpy as np
import pytest

from hyperdismantle.config import GenConfig, TrainConfig
from hyperdismantle.errors import InsufficientExperienceError
from hyperdismantle.hypersage import ParameterSet
from hyperdismantle.seeding import substream
from hyperdismantle.training import train, validation_set

GEN = GenConfig(n_min=5, n_max=8, p_burn=0.3, seed=1)


def _tiny(**changes) -> TrainConfig:
    base = dict(
        episodes=4,
        warmup=4,
        embed_dim=4,
        layers=1,
        batch_size=4,
        validation_interval=2,
        validation_size=2,
        validation_batch_frac=0.25,
        target_copy_every=2,
    )
    return TrainConfig(**{**base, **changes})


def _assert_same(a: ParameterSet, b: ParameterSet) -> None:
    for (name, x), (_, y) in zip(a.named(), b.named()):
        np.testing.assert_array_equal(x, y, err_msg=name)


def test_no_updates_during_warmup() -> None:
    cfg = _tiny()
    result = train(cfg, GEN)
    initial = ParameterSet.initialize(substream(cfg.seed, "init"), embed_dim=4, num_layers=1)
    _assert_same(result.last_params, initial)
    _assert_same(result.params, initial)
    assert result.updates == 0
    assert result.losses == []
    assert [episode for episode, _ in result.curve] == [2, 4]
    assert all(score == result.initial_anc for _, score in result.curve)


def test_updates_after_warmup() -> None:
    result = train(_tiny(warmup=1, episodes=5), GEN)
    assert result.updates == 4
    assert len(result.losses) == 4
    assert all(np.isfinite(loss) and loss >= 0.0 for loss in result.losses)
    assert len(result.curve) == 2
    assert result.best_anc == min([result.initial_anc] + [score for _, score in result.curve])


def test_training_is_reproducible() -> None:
    first = train(_tiny(warmup=1), GEN)
    second = train(_tiny(warmup=1), GEN)
    _assert_same(first.last_params, second.last_params)
    assert first.curve == second.curve
    assert first.losses == second.losses


def test_empty_buffer_at_first_update_raises() -> None:
    # Single-node instances are already fragmented, so episodes store nothing.
    with pytest.raises(InsufficientExperienceError):
        train(_tiny(warmup=0, episodes=1), GenConfig(n_min=1, n_max=1))


def test_validation_set_is_separate_from_training_stream() -> None:
    cfg = _tiny(validation_size=3)
    held_out = validation_set(cfg, GEN)
    assert len(held_out) == 3
    assert [G.signature for G in held_out] == [G.signature for G in validation_set(cfg, GEN)]
