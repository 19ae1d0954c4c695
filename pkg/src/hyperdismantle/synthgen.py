"""Forest-fire growth generator for small synthetic training hypernetworks.

Each arriving node picks a uniform ambassador, burns outward from it through
co-membership links and joins the burned set in a new hyperedge. With the
expanding probability a second fire from a fresh ambassador adds one more
hyperedge for the same node.
"""

from __future__ import annotations

import logging
from collections import deque
from typing import Dict, List, Set

import numpy as np

from hyperdismantle.config import GenConfig
from hyperdismantle.errors import InvalidConfigError
from hyperdismantle.hypergraph import Hypernetwork
from hyperdismantle.seeding import substream

logger = logging.getLogger(__name__)


def _burn(
    ambassador: int,
    neighbors: Dict[int, Set[int]],
    p_burn: float,
    cap: int,
    rng: np.random.Generator,
) -> List[int]:
    burned = {ambassador}
    frontier = deque([ambassador])
    while frontier and len(burned) < cap:
        x = frontier.popleft()
        for y in sorted(neighbors[x]):
            if y in burned:
                continue
            if rng.random() < p_burn:
                burned.add(y)
                frontier.append(y)
                if len(burned) >= cap:
                    break
    return sorted(burned)


def generate(cfg: GenConfig, substream_index: int = 0, label: str = "gen") -> Hypernetwork:
    """Grow one connected hypernetwork.

    Args:
        cfg: Generator settings.
        substream_index: Which seed-derived substream to draw from.
        label: Substream family; held-out sets use their own label.

    Returns:
        A connected hypernetwork whose node count lies in [n_min, n_max].
    """
    if cfg.n_min < 1 or cfg.n_min > cfg.n_max:
        raise InvalidConfigError(f"node range [{cfg.n_min}, {cfg.n_max}] is degenerate")
    rng = substream(cfg.seed, label, substream_index)
    n = int(rng.integers(cfg.n_min, cfg.n_max + 1))
    cap = max(cfg.burn_cap, 1)

    hyperedges: List[List[int]] = [[0]]
    neighbors: Dict[int, Set[int]] = {0: set()}

    def join(v: int, members: List[int]) -> None:
        hyperedges.append(members + [v])
        for u in members:
            neighbors[u].update(m for m in members if m != u)
            neighbors[u].add(v)
        neighbors[v].update(members)

    for v in range(1, n):
        neighbors[v] = set()
        join(v, _burn(int(rng.integers(0, v)), neighbors, cfg.p_burn, cap, rng))
        if rng.random() < cfg.p_expand:
            join(v, _burn(int(rng.integers(0, v)), neighbors, cfg.p_burn, cap, rng))

    return Hypernetwork.from_hyperedges(hyperedges, num_nodes=n)


def generate_batch(cfg: GenConfig, k: int, label: str = "gen") -> List[Hypernetwork]:
    """Generate ``k`` instances from substreams 0..k-1.

    Larger batches extend smaller ones: instance ``i`` only depends on
    ``(cfg, i)``.
    """
    if k < 1:
        raise InvalidConfigError(f"batch size must be at least 1, got {k}")
    batch = [generate(cfg, i, label) for i in range(k)]
    logger.debug("[GEN] generated %d hypernetworks (seed=%d)", k, cfg.seed)
    return batch
