import networkx as nx
import numpy as np
import pytest

from hyperdismantle.agent import node_scores
from hyperdismantle.baselines import (
    AgentPolicy,
    StaticPolicy,
    Strategy,
    adaptive_next,
    ci_scores,
    degree_scores,
    hyper_degree_scores,
    make_policy,
    static_order,
)
from hyperdismantle.config import GenConfig
from hyperdismantle.errors import InvalidConfigError, NoActionsError
from hyperdismantle.hypergraph import Hypernetwork, remove_node, remove_nodes
from hyperdismantle.hypersage import ParameterSet
from hyperdismantle.synthgen import generate


def _ball_boundary_ci(G: Hypernetwork, radius: int) -> dict:
    """CI by explicit breadth-first layers over shared hyperedges."""
    neighbours = {v: set() for v in G.nodes}
    for members in G.hyperedges.values():
        for u in members:
            neighbours[u] |= members - {u}
    scores = {}
    for v in G.nodes:
        seen, layer = {v}, {v}
        for _ in range(radius):
            layer = {w for u in layer for w in neighbours[u]} - seen
            seen |= layer
        scores[v] = (len(neighbours[v]) - 1) * sum(len(neighbours[u]) - 1 for u in layer)
    return scores


def test_static_degree_puts_hub_first(star) -> None:
    assert static_order(star, "HD") == [0, 1, 2, 3, 4]
    assert static_order(star, "HHD") == [0, 1, 2, 3, 4]


def test_hyper_degree_counts_hyperedges(two_edges) -> None:
    assert hyper_degree_scores(two_edges) == {0: 1.0, 1: 1.0, 2: 2.0, 3: 1.0}
    assert degree_scores(two_edges) == {0: 2.0, 1: 2.0, 2: 3.0, 3: 1.0}


def test_adaptive_breaks_ties_by_smallest_id(star) -> None:
    residual = remove_node(star, 0)
    assert adaptive_next(residual, "HDA") == 1
    assert adaptive_next(residual, "HHDA") == 1
    assert adaptive_next(star, "HHDA") == 0


def test_adaptive_next_on_empty_raises(two_edges) -> None:
    with pytest.raises(NoActionsError):
        adaptive_next(remove_nodes(two_edges, [0, 1, 2, 3]), "HDA")


def test_ci_path_example() -> None:
    path = Hypernetwork.from_hyperedges([[0, 1], [1, 2], [2, 3], [3, 4]])
    assert ci_scores(path) == {0: 0.0, 1: 1.0, 2: 0.0, 3: 1.0, 4: 0.0}
    assert adaptive_next(path, "CI") == 1


def test_ci_of_degree_one_node_is_zero(star) -> None:
    scores = ci_scores(star)
    assert all(scores[leaf] == 0.0 for leaf in (1, 2, 3, 4))


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("radius", [1, 2, 3])
def test_ci_matches_layered_bfs(seed: int, radius: int) -> None:
    G = generate(GenConfig(n_min=8, n_max=8, p_burn=0.4, p_expand=0.3, seed=seed))
    assert ci_scores(G, radius) == pytest.approx(_ball_boundary_ci(G, radius))


def test_degree_on_graph_like_hypernetwork_matches_networkx() -> None:
    pairs = [[0, 1], [1, 2], [0, 1], [2, 3], [3, 0], [4, 2]]
    G = Hypernetwork.from_hyperedges(pairs)
    reference = nx.Graph()
    reference.add_edges_from(tuple(p) for p in pairs)
    assert degree_scores(G) == {v: float(d) for v, d in reference.degree()}


def test_static_policy_skips_removed_nodes(star) -> None:
    policy = StaticPolicy([0, 1, 2, 3, 4])
    assert policy.select(remove_node(star, 1), 2) == [0, 2]
    assert policy.select(remove_nodes(star, [0, 1, 2]), 5) == [3, 4]
    assert policy.select(remove_nodes(star, [0, 1, 2, 3, 4]), 1) == []


def test_agent_policy_takes_top_q_nodes() -> None:
    G = generate(GenConfig(n_min=10, n_max=10, seed=4))
    params = ParameterSet.initialize(np.random.default_rng(4), embed_dim=8, num_layers=2)
    _, scores = node_scores(G, params)
    expected = sorted(G.node_ids.tolist(), key=lambda v: (-scores[G.node_row[v]], v))[:3]
    assert AgentPolicy(params).select(G, 3) == expected


def test_agent_policy_breaks_ties_by_smallest_id(star) -> None:
    zeros = ParameterSet.zeros((1, 4, 4))
    assert AgentPolicy(zeros).select(star, 2) == [0, 1]


def test_random_strategy_is_seeded(star) -> None:
    first = make_policy(Strategy("RANDOM", seed=5), star).select(star, 5)
    again = make_policy(Strategy("RANDOM", seed=5), star).select(star, 5)
    assert first == again
    assert sorted(first) == [0, 1, 2, 3, 4]


def test_strategy_validation() -> None:
    with pytest.raises(InvalidConfigError):
        Strategy("AGENT")
    with pytest.raises(InvalidConfigError):
        Strategy("PAGERANK")  # type: ignore[arg-type]
    with pytest.raises(InvalidConfigError):
        Strategy("CI", ci_radius=0)
    with pytest.raises(InvalidConfigError):
        static_order(Hypernetwork.from_hyperedges([[0, 1]]), "HDA")  # type: ignore[arg-type]
    assert Strategy("CI").name == "CI"
    assert Strategy("CI", ci_radius=3).name == "CI3"


@pytest.mark.parametrize("kind", ["HDA", "HHDA", "CI"])
@pytest.mark.parametrize("seed", range(5))
def test_adaptive_batches_only_hold_residual_nodes(kind: str, seed: int) -> None:
    G = generate(GenConfig(n_min=10, n_max=30, p_burn=0.4, seed=seed))
    policy = make_policy(Strategy(kind), G)  # type: ignore[arg-type]
    residual = G
    k = 1 + seed % 3
    while residual.nodes:
        batch = policy.select(residual, k)
        assert batch
        assert len(set(batch)) == len(batch)
        assert set(batch) <= residual.nodes
        residual = remove_nodes(residual, batch)
