"""Disjoint-set forest carrying per-component node and hyperedge counts."""

from __future__ import annotations

from typing import Dict, Iterator, Tuple


class ComponentForest:
    """Union-find over node ids with union by size and path halving.

    Each root keeps the component's node count, hyperedge count and smallest
    member id, which is everything the giant-component rule needs.
    """

    def __init__(self) -> None:
        self._parent: Dict[int, int] = {}
        self._nodes: Dict[int, int] = {}
        self._edges: Dict[int, int] = {}
        self._min_id: Dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._parent)

    def __contains__(self, item: int) -> bool:
        return item in self._parent

    def add(self, x: int) -> None:
        if x in self._parent:
            raise RuntimeError("already inserted")
        self._parent[x] = x
        self._nodes[x] = 1
        self._edges[x] = 0
        self._min_id[x] = x

    def find(self, x: int) -> int:
        parent = self._parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, x: int, y: int) -> int:
        """Merge the components of ``x`` and ``y`` and return the new root."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return rx
        if self._nodes[rx] < self._nodes[ry]:
            rx, ry = ry, rx
        self._parent[ry] = rx
        self._nodes[rx] += self._nodes.pop(ry)
        self._edges[rx] += self._edges.pop(ry)
        self._min_id[rx] = min(self._min_id[rx], self._min_id.pop(ry))
        return rx

    def add_hyperedge(self, x: int) -> None:
        """Count one more hyperedge in the component of ``x``."""
        self._edges[self.find(x)] += 1

    def roots(self) -> Iterator[Tuple[int, int, int, int]]:
        """Yield ``(root, node_count, hyperedge_count, min_id)`` per component."""
        for root, count in self._nodes.items():
            yield root, count, self._edges[root], self._min_id[root]

    def giant(self) -> Tuple[int, int] | None:
        """Return ``(root, node_count)`` of the giant component, or None if empty.

        Ordering: most hyperedges, then most nodes, then smallest member id.
        """
        best = None
        best_key = None
        for root, nodes, edges, min_id in self.roots():
            key = (edges, nodes, -min_id)
            if best_key is None or key > best_key:
                best_key, best = key, (root, nodes)
        return best
