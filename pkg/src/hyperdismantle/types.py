"""State and context definitions for the evaluation pipeline.

The pipeline loads the datasets once, fans out one task per strategy and
merges the per-strategy results into a single table.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import Annotated, Any, Dict, List, Literal

from typing_extensions import TypedDict

from hyperdismantle.config import GenConfig, SirConfig
from hyperdismantle.hypergraph import Hypernetwork
from hyperdismantle.hypersage import ParameterSet


class Context(TypedDict, total=False):
    """Run-time parameters of one pipeline invocation."""

    mode: Literal["eval", "sir"]
    dataset_format: Literal["hyperedge-list", "contact-timestamps"]
    gcc: bool
    synthetic: int
    gen_config: GenConfig
    sir_config: SirConfig
    batch_frac: float
    budget: int | None
    ci_radius: int
    method: Literal["incremental", "naive"]
    seed: int
    params: ParameterSet | None


class StrategyTask(TypedDict):
    """Payload sent to one ``evaluate_strategy`` branch."""

    index: int
    strategy: str
    instances: Dict[str, List[Hypernetwork]]


@dataclass
class State:
    """Pipeline input, intermediate datasets and merged results."""

    # Input
    datasets: List[str] = field(default_factory=list)
    strategies: List[str] = field(default_factory=list)

    # Loaded instances, keyed by dataset name
    instances: Dict[str, List[Hypernetwork]] = field(default_factory=dict)
    input_digests: Dict[str, str] = field(default_factory=dict)

    # Parallel strategy branches append here
    results: Annotated[List[Dict[str, Any]], operator.add] = field(default_factory=list)

    # Aggregated table, one dict per output row
    table: List[Dict[str, Any]] = field(default_factory=list)
