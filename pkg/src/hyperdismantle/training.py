"""Deep Q-learning loop that trains the dismantling agent on synthetic hypernetworks."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

from tqdm import tqdm

from hyperdismantle.agent import ReplayBuffer, extract_experiences, loss_and_gradients, run_episode
from hyperdismantle.baselines import Strategy
from hyperdismantle.config import GenConfig, TrainConfig
from hyperdismantle.dismantling import mean_anc
from hyperdismantle.errors import InsufficientExperienceError
from hyperdismantle.hypergraph import Hypernetwork
from hyperdismantle.hypersage import ParameterSet
from hyperdismantle.seeding import substream
from hyperdismantle.synthgen import generate, generate_batch

logger = logging.getLogger(__name__)


@dataclass
class TrainResult:
    """Outcome of one training run.

    ``params`` holds the weights with the lowest validation ANC seen, which
    may be the initialization. ``curve`` has one (episode, mean ANC) pair per
    validation round.
    """

    params: ParameterSet
    last_params: ParameterSet
    initial_anc: float
    best_anc: float
    curve: List[Tuple[int, float]] = field(default_factory=list)
    losses: List[float] = field(default_factory=list)
    updates: int = 0


def validation_set(cfg: TrainConfig, gen_cfg: GenConfig) -> List[Hypernetwork]:
    """Held-out instances drawn from their own substream family."""
    return generate_batch(gen_cfg, cfg.validation_size, label="validation")


def validation_anc(
    params: ParameterSet, instances: List[Hypernetwork], cfg: TrainConfig
) -> float:
    """Mean ANC of the greedy agent under ``params`` on ``instances``."""
    return mean_anc(instances, Strategy("AGENT", params=params), cfg.validation_batch_frac)


def train(
    cfg: TrainConfig,
    gen_cfg: GenConfig,
    progress: bool = False,
) -> TrainResult:
    """Train the agent with n-step deep Q-learning.

    Every episode grows a fresh synthetic hypernetwork, dismantles it with
    the epsilon-greedy agent and stores one experience per step. Parameter
    updates start after the warm-up episodes; the target network is copied
    every ``target_copy_every`` episodes.

    Args:
        cfg: Training settings.
        gen_cfg: Generator settings for training and validation instances.
        progress: Show a progress bar.

    Returns:
        The best and final parameters together with the validation curve.

    Raises:
        InsufficientExperienceError: An update is due but the replay buffer is empty.
    """
    params = ParameterSet.initialize(
        substream(cfg.seed, "init"), embed_dim=cfg.embed_dim, num_layers=cfg.layers
    )
    target = params.copy()
    explore_rng = substream(cfg.seed, "explore")
    replay_rng = substream(cfg.seed, "replay")
    buffer = ReplayBuffer(cfg.replay_capacity)

    held_out = validation_set(cfg, gen_cfg)
    initial_anc = validation_anc(params, held_out, cfg)
    logger.info("[TRAIN] initial validation ANC %.6f", initial_anc)
    result = TrainResult(
        params=params.copy(), last_params=params, initial_anc=initial_anc, best_anc=initial_anc
    )

    for episode in tqdm(range(1, cfg.episodes + 1), desc="train", disable=not progress):
        G = generate(gen_cfg, episode - 1)
        sequence = run_episode(G, params, cfg, explore_rng)
        buffer.extend(extract_experiences(sequence, cfg.n_step))

        if episode > cfg.warmup:
            if not len(buffer):
                raise InsufficientExperienceError(f"replay buffer empty at episode {episode}")
            batch = buffer.sample(cfg.batch_size, replay_rng)
            breakdown, grads = loss_and_gradients(batch, params, target, cfg.gamma, cfg.alpha)
            assert grads is not None
            if grads.is_finite():
                params.add_scaled(grads, -cfg.learning_rate)
                result.updates += 1
            else:
                logger.warning("[TRAIN] non-finite gradient at episode %d, update skipped", episode)
            result.losses.append(breakdown.total)

        if episode % cfg.target_copy_every == 0:
            target = params.copy()

        if episode % cfg.validation_interval == 0:
            score = validation_anc(params, held_out, cfg)
            result.curve.append((episode, score))
            if score < result.best_anc:
                result.best_anc = score
                result.params = params.copy()
            logger.info(
                "[TRAIN] episode %d validation ANC %.6f (best %.6f)", episode, score, result.best_anc
            )

    result.last_params = params
    return result
