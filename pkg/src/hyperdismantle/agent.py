"""Epsilon-greedy dismantling agent, n-step experiences and the training losses."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from hyperdismantle.config import TrainConfig
from hyperdismantle.errors import NoActionsError
from hyperdismantle.hypergraph import Hypernetwork, components, connectivity, remove_node
from hyperdismantle.hypersage import (
    Embedding,
    ParameterSet,
    embed,
    gradients,
    q_value_backward,
    q_values,
    state_embed,
)


@dataclass(frozen=True)
class Experience:
    """(s_t, a_t, r_{t,t+n}, s_{t+n}) with residual hypernetworks as snapshots."""

    state: Hypernetwork
    action: int
    reward: float
    next_state: Hypernetwork
    terminal: bool


@dataclass
class DecisionSequence:
    """s_0, a_0, r_0, ..., s_{T-1}, a_{T-1}, r_{T-1}, s_T of one episode."""

    states: List[Hypernetwork] = field(default_factory=list)
    actions: List[int] = field(default_factory=list)
    rewards: List[float] = field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.actions)


class ReplayBuffer:
    """Fixed-capacity experience pool that evicts oldest-first."""

    def __init__(self, capacity: int = 50000) -> None:
        self.capacity = capacity
        self._items: List[Experience] = []
        self._cursor = 0

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self) -> Iterator[Experience]:
        """Iterate from oldest to newest."""
        if len(self._items) < self.capacity:
            return iter(self._items)
        return iter(self._items[self._cursor :] + self._items[: self._cursor])

    def push(self, experience: Experience) -> None:
        if len(self._items) < self.capacity:
            self._items.append(experience)
        else:
            self._items[self._cursor] = experience
            self._cursor = (self._cursor + 1) % self.capacity

    def extend(self, experiences: Sequence[Experience]) -> None:
        for experience in experiences:
            self.push(experience)

    def sample(self, batch_size: int, rng: np.random.Generator) -> List[Experience]:
        """Draw ``batch_size`` experiences uniformly with replacement."""
        picks = rng.integers(0, len(self._items), size=batch_size)
        return [self._items[i] for i in picks]


def reward(residual: Hypernetwork, original_n: int) -> float:
    """Punishment -connectivity(residual)."""
    return -connectivity(residual, original_n)


def node_scores(G: Hypernetwork, params: ParameterSet) -> Tuple[Embedding, np.ndarray]:
    """q(s, a) for every node of ``G``, in ``G.node_ids`` order."""
    embedding = embed(G, params)
    x_state = state_embed(G, params, embedding)
    rows = np.arange(len(G.nodes))
    return embedding, q_values(embedding.x, x_state, rows, params.w8, params.w9)


def select_action(
    G: Hypernetwork,
    params: ParameterSet,
    epsilon: float,
    rng: np.random.Generator,
) -> int:
    """Uniform random node with probability epsilon, else the argmax-q node.

    Ties in q go to the smallest node id.
    """
    if not G.nodes:
        raise NoActionsError("no nodes left to remove")
    if rng.random() < epsilon:
        return int(rng.choice(G.node_ids))
    _, scores = node_scores(G, params)
    return int(G.node_ids[int(np.argmax(scores))])


def is_terminal(G: Hypernetwork, termination: str = "fully-fragmented") -> bool:
    """Fully fragmented residual, or any split under ``first-disconnect``."""
    if G.is_fragmented:
        return True
    return termination == "first-disconnect" and components(G).num_components > 1


def run_episode(
    G: Hypernetwork,
    params: ParameterSet,
    cfg: TrainConfig,
    rng: np.random.Generator,
) -> DecisionSequence:
    """Dismantle ``G`` one node at a time until the episode terminates.

    Each reward is computed on the residual after that step's removal with
    the initial node count as denominator.
    """
    original_n = len(G)
    sequence = DecisionSequence(states=[G])
    state = G
    while not is_terminal(state, cfg.termination):
        action = select_action(state, params, cfg.epsilon, rng)
        state = remove_node(state, action)
        sequence.actions.append(action)
        sequence.rewards.append(reward(state, original_n))
        sequence.states.append(state)
    return sequence


def extract_experiences(sequence: DecisionSequence, n: int) -> List[Experience]:
    """One experience per step with the inclusive window r_t + ... + r_{min(t+n, T-1)}.

    The next state is s_{min(t+n, T)}; the experience is terminal when that
    is s_T. Rewards inside the window are not discounted.
    """
    T = sequence.length
    experiences = []
    for t in range(T):
        end = min(t + n, T)
        experiences.append(
            Experience(
                state=sequence.states[t],
                action=sequence.actions[t],
                reward=float(sum(sequence.rewards[t : min(t + n, T - 1) + 1])),
                next_state=sequence.states[end],
                terminal=end == T,
            )
        )
    return experiences


def recon_loss(Y: np.ndarray, G: Hypernetwork) -> float:
    """Sum over e and e' in nei(e) of ||Y_e - Y_e'||^2; each pair counts twice."""
    if not G.num_hyperedges:
        return 0.0
    rows, cols = G.hyperedge_adjacency.nonzero()
    diff = Y[rows] - Y[cols]
    return float(np.sum(diff * diff))


def _recon_adjoint(Y: np.ndarray, G: Hypernetwork, scale: float) -> np.ndarray:
    d_y = np.zeros_like(Y)
    if G.num_hyperedges:
        rows, cols = G.hyperedge_adjacency.nonzero()
        diff = 2.0 * scale * (Y[rows] - Y[cols])
        np.add.at(d_y, rows, diff)
        np.add.at(d_y, cols, -diff)
    return d_y


def bootstrap_target(
    experience: Experience, target_params: ParameterSet, gamma: float
) -> float:
    """r_acc + gamma * max_a q_hat(s_next, a); terminal experiences use r_acc alone."""
    if experience.terminal or not experience.next_state.nodes:
        return experience.reward
    _, scores = node_scores(experience.next_state, target_params)
    return experience.reward + gamma * float(np.max(scores))


@dataclass
class LossBreakdown:
    total: float
    td: float
    recon: float


def loss_and_gradients(
    batch: Sequence[Experience],
    params: ParameterSet,
    target_params: ParameterSet,
    gamma: float,
    alpha: float,
    with_gradients: bool = True,
) -> Tuple[LossBreakdown, ParameterSet | None]:
    """Evaluate L = L_Q + alpha * L_E over a batch and optionally its gradient.

    Both terms are batch means; L_E is taken on the hyperedge embeddings of
    each experience's s_t. Embeddings are recomputed from the snapshots with
    the current parameters.
    """
    size = len(batch)
    grads = ParameterSet.zeros(params.dims) if with_gradients else None
    td_total = 0.0
    recon_total = 0.0
    for experience in batch:
        state = experience.state
        embedding = embed(state, params)
        x_state = state_embed(state, params, embedding)
        row = state.node_row[experience.action]
        q = float(q_values(embedding.x, x_state, [row], params.w8, params.w9)[0])
        error = bootstrap_target(experience, target_params, gamma) - q
        td_total += error * error / size
        recon_total += recon_loss(embedding.y, state) / size

        if grads is not None:
            d_x = np.zeros_like(embedding.x)
            d_state = np.zeros_like(x_state)
            q_value_backward(embedding, row, params, -2.0 * error / size, grads, d_x, d_state)
            d_y = _recon_adjoint(embedding.y, state, alpha / size)
            gradients(embedding, params, state, grads, d_x=d_x, d_y=d_y, d_state=d_state)

    breakdown = LossBreakdown(total=td_total + alpha * recon_total, td=td_total, recon=recon_total)
    return breakdown, grads


def td_loss(
    batch: Sequence[Experience],
    params: ParameterSet,
    target_params: ParameterSet,
    gamma: float,
) -> float:
    """Mean of (r_acc + gamma * max_a q_hat(s_next, a) - q(s_t, a_t))^2."""
    return loss_and_gradients(batch, params, target_params, gamma, 0.0, with_gradients=False)[0].td


def total_loss(
    batch: Sequence[Experience],
    params: ParameterSet,
    target_params: ParameterSet,
    cfg: TrainConfig,
) -> float:
    """L_Q + alpha * mean L_E."""
    breakdown, _ = loss_and_gradients(
        batch, params, target_params, cfg.gamma, cfg.alpha, with_gradients=False
    )
    return breakdown.total
