"""Strategy evaluation pipeline.

load_datasets -> evaluate_strategy (one branch per strategy) -> aggregate

Each branch dismantles every loaded dataset with its strategy (``eval``
mode) or builds the immunization table on the contact hypernetwork (``sir``
mode). Branch results are merged by the ``results`` reducer and re-ordered
by requested strategy order, so the table does not depend on which branch
finishes first.
"""

from __future__ import annotations

import asyncio
import logging
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
from langgraph.graph import StateGraph
from langgraph.runtime import Runtime
from langgraph.types import Send

from hyperdismantle.baselines import STRATEGY_KINDS, Strategy
from hyperdismantle.config import DEFAULT_THREADS, GenConfig, SirConfig
from hyperdismantle.dismantling import anc, dismantle
from hyperdismantle.epidemic import containment_table
from hyperdismantle.errors import EmptyDatasetError, InvalidConfigError
from hyperdismantle.hypergraph import Hypernetwork
from hyperdismantle.io import file_digest, load_hypernetwork
from hyperdismantle.synthgen import generate_batch
from hyperdismantle.types import Context, State, StrategyTask

logger = logging.getLogger(__name__)


def build_strategy(name: str, context: Context) -> Strategy:
    """Turn a strategy name such as ``HHDA`` or ``agent`` into a :class:`Strategy`."""
    kind = name.upper()
    if kind not in STRATEGY_KINDS:
        raise InvalidConfigError(f"unknown strategy {name!r}; choose from {', '.join(STRATEGY_KINDS)}")
    return Strategy(
        kind=kind,  # type: ignore[arg-type]
        ci_radius=context.get("ci_radius", 2),
        params=context.get("params") if kind == "AGENT" else None,
        seed=context.get("seed", 0),
    )


async def load_datasets(state: State, runtime: Runtime[Context]) -> Dict[str, Any]:
    """Read every dataset file and optionally grow a synthetic set."""
    context = runtime.context or {}
    instances = {}
    digests = {}
    for path in state.datasets:
        G, _ = load_hypernetwork(
            path, context.get("dataset_format", "hyperedge-list"), gcc=context.get("gcc", False)
        )
        instances[Path(path).stem] = [G]
        digests[str(path)] = file_digest(path)

    synthetic = context.get("synthetic", 0)
    if synthetic:
        instances["synthetic"] = generate_batch(context.get("gen_config") or GenConfig(), synthetic)
    if not instances:
        raise EmptyDatasetError("no datasets given and no synthetic instances requested")

    strategies = [s.upper() for s in state.strategies]
    for name in strategies:
        build_strategy(name, context)
    logger.info("[EVAL] %d datasets, strategies %s", len(instances), ",".join(strategies))
    return {"instances": instances, "input_digests": digests, "strategies": strategies}


def fan_out(state: State) -> List[Send]:
    """Send one task per requested strategy."""
    return [
        Send("evaluate_strategy", {"index": i, "strategy": name, "instances": state.instances})
        for i, name in enumerate(state.strategies)
    ]


def _mean_anc(instances: List[Hypernetwork], strategy: Strategy, context: Context) -> float:
    traces = [
        dismantle(
            G,
            strategy,
            context.get("batch_frac", 0.01),
            budget=context.get("budget"),
            method=context.get("method", "incremental"),
        )
        for G in instances
    ]
    return float(np.mean([anc(trace) for trace in traces]))


async def evaluate_strategy(task: StrategyTask, runtime: Runtime[Context]) -> Dict[str, Any]:
    """Evaluate one strategy on every loaded dataset."""
    context = runtime.context or {}
    strategy = build_strategy(task["strategy"], context)
    result: Dict[str, Any] = {"index": task["index"], "strategy": task["strategy"]}

    if context.get("mode") == "sir":
        name, instances = next(iter(task["instances"].items()))
        cfg = context.get("sir_config") or SirConfig()
        result["dataset"] = name
        result["cells"] = await asyncio.to_thread(containment_table, instances[0], strategy, cfg)
        logger.info("[SIR] %s done on %s", task["strategy"], name)
    else:
        scores = {}
        for name, instances in task["instances"].items():
            scores[name] = await asyncio.to_thread(_mean_anc, instances, strategy, context)
            logger.info("[EVAL] %s on %s: ANC %.6f", task["strategy"], name, scores[name])
        result["anc"] = scores
    return {"results": [result]}


async def aggregate(state: State, runtime: Runtime[Context]) -> Dict[str, Any]:
    """Merge branch results into one table.

    ``eval`` rows are datasets with one ANC column per strategy; ``sir``
    rows are strategies with a mean and a standard-error column per ratio.
    """
    context = runtime.context or {}
    ordered = sorted(state.results, key=lambda r: r["index"])
    table: List[Dict[str, Any]] = []
    if context.get("mode") == "sir":
        for result in ordered:
            row: Dict[str, Any] = {"strategy": result["strategy"]}
            for cell in result["cells"]:
                row[f"{cell.ratio:.2f}"] = cell.mean
            for cell in result["cells"]:
                row[f"se_{cell.ratio:.2f}"] = cell.stderr
            table.append(row)
    else:
        for name in state.instances:
            row = {"dataset": name}
            row.update({result["strategy"]: result["anc"][name] for result in ordered})
            table.append(row)
    return {"table": table}


def build_graph():
    """Compile the evaluation pipeline."""
    builder = StateGraph(State, context_schema=Context)
    builder.add_node("load_datasets", load_datasets)
    builder.add_node("evaluate_strategy", evaluate_strategy)
    builder.add_node("aggregate", aggregate)

    builder.add_edge("__start__", "load_datasets")
    builder.add_conditional_edges("load_datasets", fan_out, ["evaluate_strategy"])
    builder.add_edge("evaluate_strategy", "aggregate")
    return builder.compile(name="Hypernetwork dismantling evaluation")


graph = build_graph()


def run_pipeline(state: State, context: Context, threads: int = DEFAULT_THREADS) -> Dict[str, Any]:
    """Invoke the pipeline synchronously and return its final state values."""
    return asyncio.run(
        graph.ainvoke(state, context=context, config={"max_concurrency": threads})
    )
