"""Inductive two-level hypernetwork embedding and the Q-value head.

Each layer merges node embeddings into hyperedge embeddings with attention,
aggregates every hyperedge with its neighbour hyperedges, then aggregates
every node from the hyperedges containing it. A virtual node that reads from
all hyperedges, and is read by nothing, embeds the whole residual
hypernetwork as the agent's state.

Matrices follow row-per-entity layout: ``X`` is |V| x d_l, ``Y`` is |E| x d_l.
Forward passes keep every intermediate in :class:`LayerState` so
:func:`gradients` can replay the adjoints without recomputing the forward.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Tuple

import numpy as np
from scipy import sparse

from hyperdismantle.errors import EmptyHyperedgeError, EmptyHypernetworkError, StaleCacheError
from hyperdismantle.hypergraph import Hypernetwork

_LAYER_WEIGHTS = ("W1", "W2", "W3", "W4", "W5", "W6", "W7")


@dataclass
class ParameterSet:
    """Weights W1..W7 per layer plus the Q-network vectors W8, W9.

    Shapes for layer ``l`` with ``d = dims[l]`` and ``d' = dims[l+1]``:
    W1 1 x d, W2 and W3 d' x d, W4 2d' x d', W5 d' x d', W6 d' x d,
    W7 2d' x d'. W8 and W9 are d_L x 1.
    """

    dims: Tuple[int, ...]
    layers: List[Dict[str, np.ndarray]]
    w8: np.ndarray
    w9: np.ndarray

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    @staticmethod
    def shapes(dims: Tuple[int, ...]) -> Iterator[Tuple[str, Tuple[int, int], int]]:
        """Yield ``(name, shape, fan_in)`` for every weight matrix."""
        for l in range(len(dims) - 1):
            d, d_next = dims[l], dims[l + 1]
            yield f"layers.{l}.W1", (1, d), d
            yield f"layers.{l}.W2", (d_next, d), d
            yield f"layers.{l}.W3", (d_next, d), d
            yield f"layers.{l}.W4", (2 * d_next, d_next), 2 * d_next
            yield f"layers.{l}.W5", (d_next, d_next), d_next
            yield f"layers.{l}.W6", (d_next, d), d
            yield f"layers.{l}.W7", (2 * d_next, d_next), 2 * d_next
        yield "W8", (dims[-1], 1), dims[-1]
        yield "W9", (dims[-1], 1), dims[-1]

    @classmethod
    def from_named(cls, dims: Tuple[int, ...], named: Dict[str, np.ndarray]) -> "ParameterSet":
        layers: List[Dict[str, np.ndarray]] = [{} for _ in range(len(dims) - 1)]
        for name, shape, _ in cls.shapes(dims):
            value = np.array(named[name], dtype=np.float64).reshape(shape)
            if name.startswith("layers."):
                _, l, key = name.split(".")
                layers[int(l)][key] = value
        return cls(
            dims=tuple(dims),
            layers=layers,
            w8=np.array(named["W8"], dtype=np.float64).reshape(dims[-1], 1),
            w9=np.array(named["W9"], dtype=np.float64).reshape(dims[-1], 1),
        )

    @classmethod
    def initialize(
        cls,
        rng: np.random.Generator,
        embed_dim: int = 64,
        num_layers: int = 3,
        input_dim: int = 1,
    ) -> "ParameterSet":
        """Draw every matrix uniformly from [-1/sqrt(fan_in), 1/sqrt(fan_in)]."""
        dims = (input_dim,) + (embed_dim,) * num_layers
        named = {}
        for name, shape, fan_in in cls.shapes(dims):
            bound = 1.0 / np.sqrt(fan_in)
            named[name] = rng.uniform(-bound, bound, size=shape)
        return cls.from_named(dims, named)

    @classmethod
    def zeros(cls, dims: Tuple[int, ...]) -> "ParameterSet":
        return cls.from_named(dims, {name: np.zeros(shape) for name, shape, _ in cls.shapes(dims)})

    def named(self) -> Iterator[Tuple[str, np.ndarray]]:
        """Yield ``(name, array)`` pairs; arrays are live views, not copies."""
        for l, layer in enumerate(self.layers):
            for key in _LAYER_WEIGHTS:
                yield f"layers.{l}.{key}", layer[key]
        yield "W8", self.w8
        yield "W9", self.w9

    def copy(self) -> "ParameterSet":
        return ParameterSet.from_named(self.dims, {k: v.copy() for k, v in self.named()})

    def add_scaled(self, other: "ParameterSet", scale: float) -> None:
        """In place: self += scale * other."""
        for (_, mine), (_, theirs) in zip(self.named(), other.named()):
            mine += scale * theirs

    def is_finite(self) -> bool:
        return all(np.isfinite(v).all() for _, v in self.named())


@dataclass
class LayerState:
    """Forward intermediates of one layer (and of the virtual node, once embedded)."""

    x_in: np.ndarray
    logits: np.ndarray
    attention: sparse.csr_matrix
    alpha: np.ndarray
    y_merged: np.ndarray
    y_neighbors: np.ndarray
    edge_concat: np.ndarray
    edge_pre: np.ndarray
    y_out: np.ndarray
    edge_messages: np.ndarray
    node_concat: np.ndarray
    node_pre: np.ndarray
    x_out: np.ndarray
    state_in: np.ndarray | None = None
    state_concat: np.ndarray | None = None
    state_pre: np.ndarray | None = None
    state_out: np.ndarray | None = None


@dataclass
class Embedding:
    """Final node/hyperedge embeddings with the caches that produced them."""

    x: np.ndarray
    y: np.ndarray
    signature: str
    input_dim: int
    layers: List[LayerState] = field(default_factory=list)
    state: np.ndarray | None = None


def _relu(a: np.ndarray) -> np.ndarray:
    return np.maximum(a, 0.0)


def _merge(
    X: np.ndarray, G: Hypernetwork, w1: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, sparse.csr_matrix]:
    n, m = len(G.nodes), G.num_hyperedges
    edge_rows, node_rows = G.pins
    if m and np.bincount(edge_rows, minlength=m).min() == 0:
        raise EmptyHyperedgeError("cannot merge an empty hyperedge")
    logits = X @ w1.ravel()
    pin_logits = logits[node_rows]
    edge_max = np.full(m, -np.inf)
    np.maximum.at(edge_max, edge_rows, pin_logits)
    weights = np.exp(pin_logits - edge_max[edge_rows])
    totals = np.bincount(edge_rows, weights=weights, minlength=m)
    alpha = weights / totals[edge_rows] if m else weights
    attention = sparse.csr_matrix((alpha, (edge_rows, node_rows)), shape=(m, n))
    return attention @ X, logits, alpha, attention


def _edge_aggregate(
    Y: np.ndarray, G: Hypernetwork, w2: np.ndarray, w3: np.ndarray, w4: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    if G.num_hyperedges:
        y_neighbors = G.normalized_hyperedge_adjacency @ Y
    else:
        y_neighbors = np.zeros_like(Y)
    concat = np.hstack([y_neighbors @ w2.T, Y @ w3.T])
    pre = concat @ w4
    return _relu(pre), y_neighbors, concat, pre


def _node_aggregate(
    X: np.ndarray,
    Y_next: np.ndarray,
    G: Hypernetwork,
    w5: np.ndarray,
    w6: np.ndarray,
    w7: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    messages = Y_next @ w5.T
    summed = G.incidence_csr @ messages if G.num_hyperedges else np.zeros((len(G.nodes), w5.shape[0]))
    concat = np.hstack([summed, X @ w6.T])
    pre = concat @ w7
    return _relu(pre), messages, concat, pre


def merge_nodes(X: np.ndarray, G: Hypernetwork, w1: np.ndarray) -> np.ndarray:
    """Attention-weighted sum of member embeddings per hyperedge.

    Returns:
        |E| x d matrix with row ``e`` = sum over v in e of alpha_{v,e} X_v, where
        alpha is the softmax of ``w1 . X_v`` over e's members.
    """
    return _merge(X, G, w1)[0]


def hyperedge_aggregate(
    Y: np.ndarray, G: Hypernetwork, w2: np.ndarray, w3: np.ndarray, w4: np.ndarray
) -> np.ndarray:
    """ReLU(W4^T [W2 Y_nei(e) || W3 Y_e]) for every hyperedge.

    Neighbour hyperedges exclude ``e`` itself; a hyperedge without neighbours
    gets a zero neighbour term.
    """
    return _edge_aggregate(Y, G, w2, w3, w4)[0]


def node_aggregate(
    X: np.ndarray,
    Y_next: np.ndarray,
    G: Hypernetwork,
    w5: np.ndarray,
    w6: np.ndarray,
    w7: np.ndarray,
) -> np.ndarray:
    """ReLU(W7^T [sum over e containing v of W5 Y_e || W6 X_v]) for every node."""
    return _node_aggregate(X, Y_next, G, w5, w6, w7)[0]


def embed(G: Hypernetwork, params: ParameterSet) -> Embedding:
    """Run every layer on all-ones input features.

    Args:
        G: Hypernetwork with at least one node.
        params: Weights; the layer count is ``params.num_layers``.

    Returns:
        Final embeddings plus per-layer caches for :func:`gradients`.
    """
    if not G.nodes:
        raise EmptyHypernetworkError("cannot embed a hypernetwork without nodes")
    input_dim = params.dims[0]
    X = np.ones((len(G.nodes), input_dim))
    Y = np.empty((G.num_hyperedges, 0))
    states: List[LayerState] = []
    for layer in params.layers:
        y_merged, logits, alpha, attention = _merge(X, G, layer["W1"])
        y_out, y_neighbors, edge_concat, edge_pre = _edge_aggregate(
            y_merged, G, layer["W2"], layer["W3"], layer["W4"]
        )
        x_out, messages, node_concat, node_pre = _node_aggregate(
            X, y_out, G, layer["W5"], layer["W6"], layer["W7"]
        )
        states.append(
            LayerState(
                x_in=X,
                logits=logits,
                attention=attention,
                alpha=alpha,
                y_merged=y_merged,
                y_neighbors=y_neighbors,
                edge_concat=edge_concat,
                edge_pre=edge_pre,
                y_out=y_out,
                edge_messages=messages,
                node_concat=node_concat,
                node_pre=node_pre,
                x_out=x_out,
            )
        )
        X, Y = x_out, y_out
    return Embedding(x=X, y=Y, signature=G.signature, input_dim=input_dim, layers=states)


def state_embed(G: Hypernetwork, params: ParameterSet, embedding: Embedding) -> np.ndarray:
    """Embed the residual hypernetwork through a read-only virtual node.

    The virtual node starts from the all-ones feature, contains every
    hyperedge and reuses W5..W7; nothing reads from it, so real embeddings are
    unchanged.

    Returns:
        The d_L state vector (also stored on ``embedding.state``).
    """
    if embedding.signature != G.signature:
        raise StaleCacheError("embedding was computed on a different topology")
    xs = np.ones(embedding.input_dim)
    for layer, cache in zip(params.layers, embedding.layers):
        concat = np.concatenate([cache.edge_messages.sum(axis=0), layer["W6"] @ xs])
        pre = concat @ layer["W7"]
        cache.state_in, cache.state_concat, cache.state_pre = xs, concat, pre
        xs = _relu(pre)
        cache.state_out = xs
    embedding.state = xs
    return xs


def q_values(
    X: np.ndarray,
    x_state: np.ndarray,
    rows: np.ndarray | List[int],
    w8: np.ndarray,
    w9: np.ndarray,
) -> np.ndarray:
    """q(s, a) = W8^T ReLU(X_s^T X_a W9) for the candidate rows of ``X``."""
    projected = X[np.asarray(rows, dtype=np.int64)] @ w9.ravel()
    return _relu(np.outer(projected, x_state)) @ w8.ravel()


def q_value_backward(
    embedding: Embedding,
    row: int,
    params: ParameterSet,
    d_q: float,
    grads: ParameterSet,
    d_x: np.ndarray,
    d_state: np.ndarray,
) -> None:
    """Accumulate the adjoint of one q(s, a) into ``grads``, ``d_x`` and ``d_state``."""
    x_a = embedding.x[row]
    x_s = embedding.state
    projected = float(x_a @ params.w9.ravel())
    hidden = projected * x_s
    active = hidden > 0
    grads.w8[:, 0] += d_q * np.where(active, hidden, 0.0)
    d_hidden = d_q * params.w8.ravel() * active
    d_projected = float(d_hidden @ x_s)
    d_state += d_hidden * projected
    d_x[row] += d_projected * params.w9.ravel()
    grads.w9[:, 0] += d_projected * x_a


def gradients(
    embedding: Embedding,
    params: ParameterSet,
    G: Hypernetwork,
    grads: ParameterSet,
    d_x: np.ndarray | None = None,
    d_y: np.ndarray | None = None,
    d_state: np.ndarray | None = None,
) -> ParameterSet:
    """Back-propagate upstream adjoints of the final X, Y and state vector.

    Args:
        embedding: Forward caches of ``G`` under ``params``.
        params: The weights used in the forward pass.
        G: Hypernetwork the caches belong to.
        grads: Buffer the parameter gradients are added into.
        d_x: dLoss/dX for the final node embeddings.
        d_y: dLoss/dY for the final hyperedge embeddings.
        d_state: dLoss/dX_s for the state vector; requires :func:`state_embed`.

    Returns:
        ``grads``, updated in place.
    """
    if embedding.signature != G.signature:
        raise StaleCacheError("topology changed since the forward pass")
    if d_state is not None and embedding.state is None:
        raise StaleCacheError("state adjoint given but the state was never embedded")

    edge_rows, node_rows = G.pins
    n, m = len(G.nodes), G.num_hyperedges
    d_x_out = np.zeros_like(embedding.x) if d_x is None else d_x
    d_y_out = np.zeros_like(embedding.y) if d_y is None else d_y
    d_s_out = d_state

    for l in range(params.num_layers - 1, -1, -1):
        layer, cache, g = params.layers[l], embedding.layers[l], grads.layers[l]
        width = layer["W5"].shape[0]
        d_messages = np.zeros_like(cache.edge_messages)

        if d_s_out is not None:
            d_pre = d_s_out * (cache.state_pre > 0)
            g["W7"] += np.outer(cache.state_concat, d_pre)
            d_concat = layer["W7"] @ d_pre
            d_messages += d_concat[:width]
            g["W6"] += np.outer(d_concat[width:], cache.state_in)
            d_s_out = layer["W6"].T @ d_concat[width:]

        d_pre = d_x_out * (cache.node_pre > 0)
        g["W7"] += cache.node_concat.T @ d_pre
        d_concat = d_pre @ layer["W7"].T
        g["W6"] += d_concat[:, width:].T @ cache.x_in
        d_x_in = d_concat[:, width:] @ layer["W6"]
        if m:
            d_messages += G.incidence_csr.T @ d_concat[:, :width]
        g["W5"] += d_messages.T @ cache.y_out
        d_y_next = d_y_out + d_messages @ layer["W5"]

        d_pre = d_y_next * (cache.edge_pre > 0)
        g["W4"] += cache.edge_concat.T @ d_pre
        d_concat = d_pre @ layer["W4"].T
        g["W2"] += d_concat[:, :width].T @ cache.y_neighbors
        d_y_neighbors = d_concat[:, :width] @ layer["W2"]
        g["W3"] += d_concat[:, width:].T @ cache.y_merged
        d_y_merged = d_concat[:, width:] @ layer["W3"]
        if m:
            d_y_merged = d_y_merged + G.normalized_hyperedge_adjacency.T @ d_y_neighbors

            alpha = cache.alpha
            d_x_in = d_x_in + cache.attention.T @ d_y_merged
            d_alpha = np.einsum("pd,pd->p", d_y_merged[edge_rows], cache.x_in[node_rows])
            weighted = np.bincount(edge_rows, weights=alpha * d_alpha, minlength=m)
            d_pin_logits = alpha * (d_alpha - weighted[edge_rows])
            d_logits = np.bincount(node_rows, weights=d_pin_logits, minlength=n)
            g["W1"] += (d_logits @ cache.x_in)[None, :]
            d_x_in = d_x_in + np.outer(d_logits, layer["W1"].ravel())

        d_x_out = d_x_in
        d_y_out = np.zeros((m, cache.x_in.shape[1]))
    return grads
