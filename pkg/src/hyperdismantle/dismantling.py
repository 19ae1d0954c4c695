"""Batch-removal dismantling harness and accumulated normalized connectivity."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Literal

import numpy as np

from hyperdismantle.baselines import Strategy, make_policy
from hyperdismantle.errors import EmptyTraceError, InvalidConfigError
from hyperdismantle.hypergraph import Hypernetwork, connectivity, connectivity_trace, remove_nodes

logger = logging.getLogger(__name__)


@dataclass
class DismantleTrace:
    """Removed batches and normalized connectivity after each of them."""

    strategy: str
    batch_frac: float
    batches: List[List[int]] = field(default_factory=list)
    connectivity: List[float] = field(default_factory=list)

    @property
    def removed(self) -> List[int]:
        return [v for batch in self.batches for v in batch]

    def __len__(self) -> int:
        return len(self.connectivity)


def batch_size(n0: int, batch_frac: float) -> int:
    """⌈batch_frac * n0⌉, at least one node."""
    if not 0.0 < batch_frac <= 1.0:
        raise InvalidConfigError(f"batch fraction {batch_frac} outside (0, 1]")
    return max(1, math.ceil(batch_frac * n0 - 1e-9))


def removal_order(
    G: Hypernetwork,
    strategy: Strategy,
    batch_frac: float,
    budget: int | None = None,
) -> List[List[int]]:
    """Run ``strategy`` on ``G`` and return the removed batches.

    Adaptive strategies re-score the residual between batches, never within
    one. Removal stops when every node is gone or ``budget`` nodes have been
    removed.
    """
    k = batch_size(len(G), batch_frac)
    limit = len(G) if budget is None else min(budget, len(G))
    policy = make_policy(strategy, G)
    residual = G
    batches: List[List[int]] = []
    removed = 0
    while residual.nodes and removed < limit:
        batch = policy.select(residual, min(k, limit - removed))
        if not batch:
            break
        residual = remove_nodes(residual, batch)
        batches.append(batch)
        removed += len(batch)
    return batches


def dismantle(
    G: Hypernetwork,
    strategy: Strategy,
    batch_frac: float = 0.01,
    budget: int | None = None,
    method: Literal["incremental", "naive"] = "incremental",
) -> DismantleTrace:
    """Dismantle ``G`` batch by batch and record the normalized connectivity.

    Args:
        G: Initial hypernetwork.
        strategy: Which nodes to remove next.
        batch_frac: Share of the initial node count removed per batch.
        budget: Optional cap on the number of removed nodes.
        method: Connectivity bookkeeping, incremental union-find or full recompute.

    Returns:
        The trace; each entry is connectivity / connectivity(G).
    """
    batches = removal_order(G, strategy, batch_frac, budget)
    trace = DismantleTrace(strategy=strategy.name, batch_frac=batch_frac, batches=batches)
    if not G.nodes:
        return trace
    initial = connectivity(G, len(G))
    raw = connectivity_trace(G, batches, len(G), method=method)
    trace.connectivity = [c / initial for c in raw]
    logger.debug(
        "[EVAL] %s removed %d nodes in %d batches", strategy.name, len(trace.removed), len(batches)
    )
    return trace


def anc(trace: DismantleTrace) -> float:
    """Mean normalized connectivity over the recorded batches."""
    if not trace.connectivity:
        raise EmptyTraceError("cannot average an empty trace")
    return float(np.mean(trace.connectivity))


def mean_anc(
    instances: List[Hypernetwork],
    strategy: Strategy,
    batch_frac: float = 0.01,
) -> float:
    """Average ANC of ``strategy`` over several hypernetworks."""
    return float(np.mean([anc(dismantle(G, strategy, batch_frac)) for G in instances]))
