"""Dataset readers and writers, checkpoints, result tables and run manifests."""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Tuple

import pandas as pd

from hyperdismantle.config import RunManifest
from hyperdismantle.errors import CheckpointVersionError, EmptyDatasetError, MalformedLineError
from hyperdismantle.hypergraph import Hypernetwork, restrict_to_gcc
from hyperdismantle.hypersage import ParameterSet

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "hyperdismantle-checkpoint"
CHECKPOINT_VERSION = 1
FLOAT_FORMAT = "%.6f"

DatasetFormat = Literal["hyperedge-list", "contact-timestamps"]


def _content_lines(path: str | Path) -> List[Tuple[int, List[str]]]:
    lines = []
    with open(path, encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            text = raw.split("#", 1)[0].strip()
            if text:
                lines.append((number, text.split()))
    if not lines:
        raise EmptyDatasetError(f"{path} contains no hyperedges")
    return lines


def _parse_ids(number: int, tokens: List[str]) -> List[int]:
    try:
        ids = [int(token) for token in tokens]
    except ValueError as exc:
        raise MalformedLineError(number, f"node ids must be integers ({exc})") from exc
    if any(v < 0 for v in ids):
        raise MalformedLineError(number, "node ids must be non-negative")
    return ids


def _densify(groups: List[List[int]]) -> Tuple[Hypernetwork, Dict[int, int]]:
    original = sorted({v for group in groups for v in group})
    dense = {v: i for i, v in enumerate(original)}
    G = Hypernetwork.from_hyperedges(
        [[dense[v] for v in group] for group in groups], num_nodes=len(original)
    )
    return G, dict(enumerate(original))


def read_hyperedge_list(path: str | Path) -> Tuple[Hypernetwork, Dict[int, int]]:
    """Read one hyperedge per line as whitespace-separated integer node ids.

    Blank lines and ``#`` comments are skipped. Node ids are re-densified in
    ascending order of the original ids.

    Returns:
        The hypernetwork and a map dense id -> id in the file.
    """
    groups = [_parse_ids(number, tokens) for number, tokens in _content_lines(path)]
    return _densify(groups)


def read_contacts(path: str | Path) -> Tuple[Hypernetwork, Dict[int, int]]:
    """Read ``timestamp node node ...`` contact groups.

    Groups are stably sorted by timestamp, so hyperedge 0 is the earliest
    contact group.
    """
    stamped = []
    for number, tokens in _content_lines(path):
        if len(tokens) < 2:
            raise MalformedLineError(number, "expected a timestamp followed by node ids")
        try:
            timestamp = float(tokens[0])
        except ValueError as exc:
            raise MalformedLineError(number, f"bad timestamp {tokens[0]!r}") from exc
        stamped.append((timestamp, _parse_ids(number, tokens[1:])))
    stamped.sort(key=lambda item: item[0])
    return _densify([group for _, group in stamped])


def load_hypernetwork(
    path: str | Path,
    fmt: DatasetFormat = "hyperedge-list",
    gcc: bool = False,
) -> Tuple[Hypernetwork, Dict[int, int]]:
    """Load a dataset, optionally keeping only its giant connected component.

    Args:
        path: Dataset file.
        fmt: ``hyperedge-list`` or ``contact-timestamps``.
        gcc: Restrict to the giant component and re-densify ids.

    Returns:
        The hypernetwork and a map from its node ids to ids in the file.
    """
    reader = read_contacts if fmt == "contact-timestamps" else read_hyperedge_list
    G, id_map = reader(path)
    if gcc:
        G, sub_map = restrict_to_gcc(G)
        id_map = {new: id_map[old] for new, old in sub_map.items()}
    logger.info("[IO] loaded %s: %d nodes, %d hyperedges", path, len(G), G.num_hyperedges)
    return G, id_map


def save_hyperedge_list(G: Hypernetwork, path: str | Path) -> None:
    """Write hyperedges in id order, members ascending, one per line."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        for members in G.edge_list():
            handle.write(" ".join(str(v) for v in members) + "\n")


def save_id_map(id_map: Dict[int, int], path: str | Path) -> None:
    frame = pd.DataFrame(sorted(id_map.items()), columns=["node", "original"])
    frame.to_csv(path, index=False)


def save_checkpoint(params: ParameterSet, path: str | Path, meta: Dict[str, Any] | None = None) -> None:
    """Serialize ``params`` as versioned JSON; floats keep full precision."""
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "dims": list(params.dims),
        "meta": meta or {},
        "weights": {name: value.tolist() for name, value in params.named()},
    }
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_checkpoint(path: str | Path) -> ParameterSet:
    """Read a checkpoint written by :func:`save_checkpoint`.

    Raises:
        CheckpointVersionError: The file is not a checkpoint of this version.
    """
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CheckpointVersionError(f"{path} is not a checkpoint: {exc}") from exc
    if payload.get("format") != CHECKPOINT_FORMAT or payload.get("version") != CHECKPOINT_VERSION:
        raise CheckpointVersionError(
            f"{path} has format {payload.get('format')!r} version {payload.get('version')!r}, "
            f"expected {CHECKPOINT_FORMAT!r} version {CHECKPOINT_VERSION}"
        )
    return ParameterSet.from_named(tuple(payload["dims"]), payload["weights"])


def write_table(frame: pd.DataFrame, path: str | Path) -> None:
    """Write a result table with six-decimal floats."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("[IO] wrote %s (%d rows)", path, len(frame))


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(manifest: RunManifest, path: str | Path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(manifest.model_dump_json(indent=2), encoding="utf-8")
