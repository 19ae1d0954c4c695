"""Greedy dismantling strategies and the policy objects that drive them.

HD, HDA and CI score nodes on the 2-section graph; HHD and HHDA use
hyper-degree on the hypernetwork itself. Static strategies rank once on the
initial structure, adaptive ones re-rank the residual before every batch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Literal, Protocol

import networkx as nx
import numpy as np

from hyperdismantle.agent import node_scores
from hyperdismantle.errors import InvalidConfigError, NoActionsError
from hyperdismantle.hypergraph import Hypernetwork, two_section
from hyperdismantle.hypersage import ParameterSet
from hyperdismantle.seeding import substream

StrategyKind = Literal["HD", "HDA", "HHD", "HHDA", "CI", "AGENT", "RANDOM"]
STRATEGY_KINDS: tuple[str, ...] = ("HD", "HDA", "HHD", "HHDA", "CI", "AGENT", "RANDOM")
STATIC_KINDS = ("HD", "HHD")
ADAPTIVE_KINDS = ("HDA", "HHDA", "CI")


@dataclass(frozen=True)
class Strategy:
    """A named dismantling strategy with the parameters its kind requires."""

    kind: StrategyKind
    ci_radius: int = 2
    params: ParameterSet | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in STRATEGY_KINDS:
            raise InvalidConfigError(f"unknown strategy {self.kind!r}")
        if self.kind == "AGENT" and self.params is None:
            raise InvalidConfigError("the AGENT strategy needs a checkpoint")
        if self.kind == "CI" and self.ci_radius < 1:
            raise InvalidConfigError("CI radius must be at least 1")

    @property
    def name(self) -> str:
        return f"CI{self.ci_radius}" if self.kind == "CI" and self.ci_radius != 2 else self.kind


def degree_scores(G: Hypernetwork) -> Dict[int, float]:
    """Node degree on the 2-section graph."""
    return {int(v): float(d) for v, d in two_section(G).degree()}


def hyper_degree_scores(G: Hypernetwork) -> Dict[int, float]:
    return {v: float(len(G.incidence[v])) for v in G.nodes}


def ci_scores(G: Hypernetwork, radius: int = 2) -> Dict[int, float]:
    """Collective influence (k_v - 1) * sum over the ball boundary of (k_u - 1).

    The boundary holds the nodes at shortest-path distance exactly ``radius``
    on the 2-section graph.
    """
    graph = two_section(G)
    k = dict(graph.degree())
    scores = {}
    for v in graph.nodes:
        lengths = nx.single_source_shortest_path_length(graph, v, cutoff=radius)
        frontier = sum(k[u] - 1 for u, dist in lengths.items() if dist == radius)
        scores[int(v)] = float((k[v] - 1) * frontier)
    return scores


def _score(G: Hypernetwork, kind: str, ci_radius: int) -> Dict[int, float]:
    if kind in ("HD", "HDA"):
        return degree_scores(G)
    if kind in ("HHD", "HHDA"):
        return hyper_degree_scores(G)
    if kind == "CI":
        return ci_scores(G, ci_radius)
    raise InvalidConfigError(f"strategy {kind!r} has no centrality score")


def _rank(scores: Dict[int, float]) -> List[int]:
    return sorted(scores, key=lambda v: (-scores[v], v))


def static_order(G: Hypernetwork, kind: Literal["HD", "HHD"]) -> List[int]:
    """Rank every node once by its initial score, descending, ties by smallest id."""
    if kind not in STATIC_KINDS:
        raise InvalidConfigError(f"{kind!r} is not a static strategy")
    return _rank(_score(G, kind, 2))


def adaptive_ranking(G: Hypernetwork, kind: str, ci_radius: int = 2) -> List[int]:
    """Rank the residual's nodes by a freshly computed score."""
    return _rank(_score(G, kind, ci_radius))


def adaptive_next(G: Hypernetwork, kind: Literal["HDA", "HHDA", "CI"], ci_radius: int = 2) -> int:
    """Return the residual node with the highest recomputed score."""
    if not G.nodes:
        raise NoActionsError("the residual hypernetwork is empty")
    if kind not in ADAPTIVE_KINDS:
        raise InvalidConfigError(f"{kind!r} is not an adaptive strategy")
    return adaptive_ranking(G, kind, ci_radius)[0]


class Policy(Protocol):
    """Chooses the next batch of nodes to remove from a residual hypernetwork."""

    def select(self, residual: Hypernetwork, k: int) -> List[int]: ...


class StaticPolicy:
    """Walks a fixed ranking, skipping nodes that are already gone."""

    def __init__(self, order: List[int]) -> None:
        self._order = order
        self._cursor = 0

    def select(self, residual: Hypernetwork, k: int) -> List[int]:
        batch: List[int] = []
        while len(batch) < k and self._cursor < len(self._order):
            v = self._order[self._cursor]
            self._cursor += 1
            if v in residual.nodes:
                batch.append(v)
        return batch


class AdaptivePolicy:
    """Re-scores the residual before every batch and takes the top ``k``."""

    def __init__(self, kind: str, ci_radius: int = 2) -> None:
        self.kind = kind
        self.ci_radius = ci_radius

    def select(self, residual: Hypernetwork, k: int) -> List[int]:
        return adaptive_ranking(residual, self.kind, self.ci_radius)[:k]


class AgentPolicy:
    """Takes the ``k`` highest-q nodes of the residual under trained weights."""

    def __init__(self, params: ParameterSet) -> None:
        self.params = params

    def select(self, residual: Hypernetwork, k: int) -> List[int]:
        _, scores = node_scores(residual, self.params)
        order = np.lexsort((residual.node_ids, -scores))
        return [int(residual.node_ids[i]) for i in order[:k]]


def make_policy(strategy: Strategy, G: Hypernetwork) -> Policy:
    """Bind ``strategy`` to the initial hypernetwork ``G`` of a dismantling run."""
    if strategy.kind in STATIC_KINDS:
        return StaticPolicy(static_order(G, strategy.kind))
    if strategy.kind in ADAPTIVE_KINDS:
        return AdaptivePolicy(strategy.kind, strategy.ci_radius)
    if strategy.kind == "RANDOM":
        rng = substream(strategy.seed, "random-strategy")
        return StaticPolicy([int(v) for v in rng.permutation(G.node_ids)])
    assert strategy.params is not None
    return AgentPolicy(strategy.params)
