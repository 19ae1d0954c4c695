"""Hypernetwork representation, degree measures, connectivity and projections.

A hypernetwork keeps its hyperedges keyed by a stable id together with the
transposed incidence view (node id -> ids of hyperedges containing it). Values
are never mutated: removal returns a new ``Hypernetwork``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, FrozenSet, Iterable, List, Literal, Mapping, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from hyperdismantle.dsu import ComponentForest
from hyperdismantle.errors import (
    EmptyHyperedgeError,
    EmptyHypernetworkError,
    InvalidDenominatorError,
    NodeNotFoundError,
)


@dataclass(frozen=True)
class Hypernetwork:
    """Node set, hyperedges keyed by id and the node -> hyperedge incidence.

    Build instances with :meth:`from_hyperedges`; the constructor trusts its
    arguments to satisfy the transpose invariant.
    """

    nodes: FrozenSet[int]
    hyperedges: Mapping[int, FrozenSet[int]]
    incidence: Mapping[int, FrozenSet[int]]

    @classmethod
    def from_hyperedges(
        cls,
        hyperedges: Iterable[Iterable[int]],
        num_nodes: int | None = None,
    ) -> "Hypernetwork":
        """Build a hypernetwork over dense node ids ``0..num_nodes-1``.

        Args:
            hyperedges: Member lists; hyperedge ids follow iteration order.
            num_nodes: Node count. Defaults to one past the largest member id,
                so isolated nodes only exist when this is given.

        Returns:
            The hypernetwork.
        """
        edges: Dict[int, FrozenSet[int]] = {}
        for edge_id, members in enumerate(hyperedges):
            member_set = frozenset(int(v) for v in members)
            if not member_set:
                raise EmptyHyperedgeError(f"hyperedge {edge_id} has no members")
            edges[edge_id] = member_set

        largest = max((max(e) for e in edges.values()), default=-1)
        n = largest + 1 if num_nodes is None else num_nodes
        if largest >= n or min((min(e) for e in edges.values()), default=0) < 0:
            raise NodeNotFoundError(f"hyperedge member outside 0..{n - 1}")

        incidence: Dict[int, set[int]] = {v: set() for v in range(n)}
        for edge_id, members in edges.items():
            for v in members:
                incidence[v].add(edge_id)
        return cls(
            nodes=frozenset(range(n)),
            hyperedges=edges,
            incidence={v: frozenset(es) for v, es in incidence.items()},
        )

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def num_hyperedges(self) -> int:
        return len(self.hyperedges)

    @cached_property
    def node_ids(self) -> np.ndarray:
        """Node ids in ascending order; row ``i`` of every node matrix is ``node_ids[i]``."""
        return np.array(sorted(self.nodes), dtype=np.int64)

    @cached_property
    def edge_ids(self) -> np.ndarray:
        """Hyperedge ids in ascending order; row order of every hyperedge matrix."""
        return np.array(sorted(self.hyperedges), dtype=np.int64)

    @cached_property
    def node_row(self) -> Dict[int, int]:
        return {int(v): i for i, v in enumerate(self.node_ids)}

    @cached_property
    def pins(self) -> Tuple[np.ndarray, np.ndarray]:
        """(hyperedge row, node row) for every membership, grouped by hyperedge."""
        edge_rows: List[int] = []
        node_rows: List[int] = []
        row = self.node_row
        for j, e in enumerate(self.edge_ids):
            for v in sorted(self.hyperedges[int(e)]):
                edge_rows.append(j)
                node_rows.append(row[v])
        return np.array(edge_rows, dtype=np.int64), np.array(node_rows, dtype=np.int64)

    @cached_property
    def incidence_csr(self) -> sparse.csr_matrix:
        """Incidence matrix H (|V| x |E|) with rows/columns in id order."""
        edge_rows, node_rows = self.pins
        data = np.ones(len(edge_rows), dtype=np.float64)
        return sparse.csr_matrix(
            (data, (node_rows, edge_rows)), shape=(len(self.nodes), len(self.hyperedges))
        )

    @cached_property
    def hyperedge_adjacency(self) -> sparse.csr_matrix:
        """0/1 matrix with a 1 where two distinct hyperedges share a node."""
        h = self.incidence_csr
        if h.shape[1] == 0:
            return sparse.csr_matrix((0, 0), dtype=np.float64)
        overlap = (h.T @ h).tocsr()
        overlap = (overlap - sparse.diags(overlap.diagonal())).tocsr()
        overlap.eliminate_zeros()
        overlap.data[:] = 1.0
        return overlap

    @cached_property
    def normalized_hyperedge_adjacency(self) -> sparse.csr_matrix:
        """Adjacency scaled by 1 / (sqrt|nei(e)| sqrt|nei(e')|); isolated hyperedges get zero rows."""
        adjacency = self.hyperedge_adjacency
        if adjacency.shape[0] == 0:
            return adjacency
        counts = np.asarray(adjacency.sum(axis=1)).ravel()
        scale = np.zeros_like(counts)
        np.divide(1.0, np.sqrt(counts), out=scale, where=counts > 0)
        return (sparse.diags(scale) @ adjacency @ sparse.diags(scale)).tocsr()

    @cached_property
    def signature(self) -> str:
        """Digest of the exact topology; changes whenever any membership changes."""
        digest = hashlib.sha1()
        digest.update(np.asarray(self.node_ids).tobytes())
        for e in self.edge_ids:
            digest.update(b"|%d:" % int(e))
            digest.update(np.array(sorted(self.hyperedges[int(e)]), dtype=np.int64).tobytes())
        return digest.hexdigest()

    @property
    def is_fragmented(self) -> bool:
        """True when no hyperedge of size >= 2 remains."""
        return all(len(members) < 2 for members in self.hyperedges.values())

    def edge_list(self) -> List[List[int]]:
        """Sorted member lists in hyperedge-id order."""
        return [sorted(self.hyperedges[int(e)]) for e in self.edge_ids]


@dataclass(frozen=True)
class ComponentLabeling:
    """Component id per node plus per-component node and hyperedge counts.

    Component ids are assigned in order of each component's smallest node id.
    """

    labels: Mapping[int, int]
    node_counts: Mapping[int, int]
    edge_counts: Mapping[int, int]
    min_ids: Mapping[int, int]

    @property
    def num_components(self) -> int:
        return len(self.node_counts)

    def members(self, component: int) -> List[int]:
        return sorted(v for v, c in self.labels.items() if c == component)

    def giant(self) -> int:
        """Component with most hyperedges, then most nodes, then smallest node id."""
        if not self.node_counts:
            raise EmptyHypernetworkError("no components in an empty hypernetwork")
        return max(
            self.node_counts,
            key=lambda c: (self.edge_counts[c], self.node_counts[c], -self.min_ids[c]),
        )


def _require_node(G: Hypernetwork, v: int) -> None:
    if v not in G.nodes:
        raise NodeNotFoundError(f"node {v} is not in the hypernetwork")


def hyper_degree(G: Hypernetwork, v: int) -> int:
    """Return the number of hyperedges containing ``v``."""
    _require_node(G, v)
    return len(G.incidence[v])


def degree(G: Hypernetwork, v: int) -> int:
    """Return sum_j (H H^T)(v, j) - hyper_degree(v), i.e. sum over e containing v of |e| - 1.

    Co-members are counted once per shared hyperedge.
    """
    _require_node(G, v)
    return sum(len(G.hyperedges[e]) - 1 for e in G.incidence[v])


def _labeling_from_groups(G: Hypernetwork, groups: Dict[int, List[int]]) -> ComponentLabeling:
    ordered = sorted(groups.values(), key=min)
    labels: Dict[int, int] = {}
    node_counts: Dict[int, int] = {}
    min_ids: Dict[int, int] = {}
    for cid, members in enumerate(ordered):
        node_counts[cid] = len(members)
        min_ids[cid] = min(members)
        for v in members:
            labels[v] = cid
    edge_counts = {cid: 0 for cid in node_counts}
    for members in G.hyperedges.values():
        edge_counts[labels[next(iter(members))]] += 1
    return ComponentLabeling(labels, node_counts, edge_counts, min_ids)


def components(G: Hypernetwork) -> ComponentLabeling:
    """Label connected components with a union-find pass over the hyperedges."""
    forest = ComponentForest()
    for v in G.nodes:
        forest.add(v)
    for members in G.hyperedges.values():
        first, *rest = members
        for v in rest:
            forest.union(first, v)
    groups: Dict[int, List[int]] = {}
    for v in G.nodes:
        groups.setdefault(forest.find(v), []).append(v)
    return _labeling_from_groups(G, groups)


def components_naive(G: Hypernetwork) -> ComponentLabeling:
    """Label components by a full recompute on the node co-membership matrix."""
    if not G.nodes:
        return ComponentLabeling({}, {}, {}, {})
    h = G.incidence_csr
    _, rows = connected_components(h @ h.T, directed=False)
    groups: Dict[int, List[int]] = {}
    for v, label in zip(G.node_ids, rows):
        groups.setdefault(int(label), []).append(int(v))
    return _labeling_from_groups(G, groups)


def gcc(G: Hypernetwork, labeling: ComponentLabeling | None = None) -> int:
    """Return the component id of the giant connected component."""
    if not G.nodes:
        raise EmptyHypernetworkError("the hypernetwork has no nodes")
    labeling = labeling or components(G)
    return labeling.giant()


def connectivity(
    G: Hypernetwork,
    original_n: int,
    method: Literal["incremental", "naive"] = "incremental",
) -> float:
    """Return |V_GCC| / original_n, or 0.0 for an empty hypernetwork.

    Args:
        G: Residual hypernetwork.
        original_n: Node count of the episode's initial hypernetwork.
        method: ``"naive"`` labels components through the full-recompute path.
    """
    if original_n <= 0 or original_n < len(G.nodes):
        raise InvalidDenominatorError(
            f"denominator {original_n} for a hypernetwork of {len(G.nodes)} nodes"
        )
    if not G.nodes:
        return 0.0
    labeling = components_naive(G) if method == "naive" else components(G)
    return labeling.node_counts[labeling.giant()] / original_n


def remove_nodes(G: Hypernetwork, vs: Iterable[int]) -> Hypernetwork:
    """Delete nodes from the node set and every hyperedge; drop emptied hyperedges."""
    removed = set(vs)
    for v in removed:
        _require_node(G, v)
    if not removed:
        return G

    edges = dict(G.hyperedges)
    dropped: set[int] = set()
    for v in removed:
        for e in G.incidence[v]:
            edges[e] = edges[e] - removed
            if not edges[e]:
                dropped.add(e)
    for e in dropped:
        del edges[e]

    incidence = {v: es for v, es in G.incidence.items() if v not in removed}
    if dropped:
        for e in dropped:
            for v in G.hyperedges[e]:
                if v in incidence:
                    incidence[v] = incidence[v] - dropped
    return Hypernetwork(nodes=G.nodes - removed, hyperedges=edges, incidence=incidence)


def remove_node(G: Hypernetwork, v: int) -> Hypernetwork:
    """Remove a single node; size-1 hyperedges that remain are kept."""
    return remove_nodes(G, (v,))


def two_section(G: Hypernetwork) -> nx.Graph:
    """Clique-expand every hyperedge into a simple undirected graph over G.nodes."""
    graph = nx.Graph()
    graph.add_nodes_from(sorted(G.nodes))
    for members in G.hyperedges.values():
        ordered = sorted(members)
        graph.add_edges_from(
            (u, w) for i, u in enumerate(ordered) for w in ordered[i + 1 :]
        )
    return graph


def incidence_matrix(G: Hypernetwork) -> Tuple[sparse.csr_matrix, np.ndarray, np.ndarray]:
    """Return (H, row node ids, column hyperedge ids)."""
    return G.incidence_csr, G.node_ids, G.edge_ids


def restrict_to_gcc(G: Hypernetwork) -> Tuple[Hypernetwork, Dict[int, int]]:
    """Keep only the giant component, re-densifying node ids.

    Returns:
        The sub-hypernetwork and a map new id -> id in ``G``.
    """
    labeling = components(G)
    giant = gcc(G, labeling)
    keep = labeling.members(giant)
    new_of = {old: new for new, old in enumerate(keep)}
    edges = [
        [new_of[v] for v in sorted(G.hyperedges[int(e)])]
        for e in G.edge_ids
        if labeling.labels[next(iter(G.hyperedges[int(e)]))] == giant
    ]
    sub = Hypernetwork.from_hyperedges(edges, num_nodes=len(keep))
    return sub, {new: old for old, new in new_of.items()}


def connectivity_trace(
    G: Hypernetwork,
    batches: Sequence[Sequence[int]],
    original_n: int | None = None,
    method: Literal["incremental", "naive"] = "incremental",
) -> List[float]:
    """Connectivity after each removal batch.

    The incremental path replays the removal sequence backwards, inserting
    nodes into a union-find forest; the naive path removes each batch and
    relabels the residual from scratch. Both return identical floats.

    Args:
        G: Hypernetwork before the first batch.
        batches: Node ids removed per batch, in removal order.
        original_n: Denominator; defaults to ``len(G)``.
        method: ``"incremental"`` or ``"naive"``.
    """
    n0 = len(G) if original_n is None else original_n
    if n0 <= 0:
        raise InvalidDenominatorError("connectivity needs a positive denominator")
    if method == "naive":
        trace = []
        residual = G
        for batch in batches:
            residual = remove_nodes(residual, batch)
            trace.append(connectivity(residual, n0, method="naive"))
        return trace

    removed = [v for batch in batches for v in batch]
    for v in removed:
        _require_node(G, v)
    forest = ComponentForest()
    anchor: Dict[int, int] = {}

    def insert(v: int) -> None:
        forest.add(v)
        for e in G.incidence[v]:
            if e in anchor:
                forest.union(v, anchor[e])
            else:
                anchor[e] = v
                forest.add_hyperedge(v)

    def current() -> float:
        giant = forest.giant()
        return 0.0 if giant is None else giant[1] / n0

    for v in sorted(G.nodes - set(removed)):
        insert(v)
    trace = [0.0] * len(batches)
    for k in range(len(batches) - 1, 0, -1):
        trace[k] = current()
        for v in batches[k]:
            insert(v)
    if batches:
        trace[0] = current()
    return trace


def summarize(G: Hypernetwork) -> Dict[str, Any]:
    """Dataset statistics: sizes, mean/max hyperedge size, degrees, GCC share."""
    sizes = [len(members) for members in G.hyperedges.values()]
    hyper_degrees = [len(G.incidence[v]) for v in G.nodes]
    labeling = components(G)
    giant_nodes = labeling.node_counts[labeling.giant()] if G.nodes else 0
    return {
        "nodes": len(G.nodes),
        "hyperedges": len(sizes),
        "mean_hyperedge_size": float(np.mean(sizes)) if sizes else 0.0,
        "max_hyperedge_size": max(sizes, default=0),
        "mean_hyper_degree": float(np.mean(hyper_degrees)) if hyper_degrees else 0.0,
        "components": labeling.num_components,
        "gcc_share": giant_nodes / len(G.nodes) if G.nodes else 0.0,
    }
