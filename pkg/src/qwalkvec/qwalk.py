"""Discrete-time coined quantum walk kernel on the arc space of a graph.

The walker's state lives on directed arcs: each undirected edge {i, j}
contributes the two arcs i->j and j->i, and the state assigns a complex
amplitude to every arc. One step applies, in order,

* a node-local coin: at each node the amplitudes over its outgoing arcs are
  reflected about a weighted axis (a rank-1 reflection, so the per-node cost
  is linear in the degree), then
* the flip-flop shift: the amplitude on arc i->j moves to arc j->i.

Coin weights are derived from BFS distances to a chosen source node: arcs
leaving the source keep weight 1, arcs stepping back toward the source get
1/return_param, and arcs staying at the same distance or stepping away get
1/inout_param. With both parameters at 1 this reduces to the standard Grover
walk. A dense-matrix reference evolution is included for verification.

Arrays use a fixed canonical arc order (grouped by tail node ascending, heads
ascending within a group), so summations are bit-reproducible per build.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, DistanceVector, bfs_distances

DENSE_ARC_LIMIT = 2000


@dataclass(frozen=True)
class ArcSpace:
    """Canonical indexing of the directed arcs of a graph.

    tail[a] / head[a] are the endpoints of arc a; reverse[a] is the index of
    the opposite arc head->tail; node_ptr is a CSR-style offset array so the
    outgoing arcs of node i occupy indices node_ptr[i]:node_ptr[i+1].
    """

    tail: np.ndarray
    head: np.ndarray
    reverse: np.ndarray
    node_ptr: np.ndarray

    @property
    def arc_count(self) -> int:
        return len(self.tail)

    @property
    def node_count(self) -> int:
        return len(self.node_ptr) - 1


@dataclass(frozen=True)
class WalkParams:
    """Walk hyperparameters: bias strengths and the number of steps."""

    return_param: float
    inout_param: float
    walk_length: int

    def __post_init__(self) -> None:
        if not self.return_param > 0:
            raise ValueError(f"return_param must be positive, got {self.return_param}")
        if not self.inout_param > 0:
            raise ValueError(f"inout_param must be positive, got {self.inout_param}")
        if self.walk_length < 1:
            raise ValueError(f"walk_length must be >= 1, got {self.walk_length}")


@dataclass(frozen=True)
class WeightVector:
    """Per-arc coin weights for a fixed source node (all strictly positive)."""

    source: int
    w: np.ndarray


def build_arc_space(graph: Graph) -> ArcSpace:
    """Index the arcs of a graph in canonical order with reverse-arc lookup."""
    degrees = np.array(graph.degrees(), dtype=np.int64)
    node_ptr = np.zeros(graph.node_count + 1, dtype=np.int64)
    np.cumsum(degrees, out=node_ptr[1:])
    arc_count = int(node_ptr[-1])

    tail = np.empty(arc_count, dtype=np.int64)
    head = np.empty(arc_count, dtype=np.int64)
    for i, nbrs in enumerate(graph.adjacency):
        lo, hi = node_ptr[i], node_ptr[i + 1]
        tail[lo:hi] = i
        head[lo:hi] = nbrs

    # The reverse of arc (i -> j) sits at node_ptr[j] + rank of i among j's
    # neighbors; neighbor lists are sorted, so the rank is a binary search.
    reverse = np.empty(arc_count, dtype=np.int64)
    for a in range(arc_count):
        j = head[a]
        lo, hi = node_ptr[j], node_ptr[j + 1]
        reverse[a] = lo + np.searchsorted(head[lo:hi], tail[a])

    for arr in (tail, head, reverse, node_ptr):
        arr.setflags(write=False)
    return ArcSpace(tail=tail, head=head, reverse=reverse, node_ptr=node_ptr)


def coin_weights(graph: Graph, dist: DistanceVector, params: WalkParams,
                 arcs: ArcSpace | None = None) -> WeightVector:
    """Assign per-arc coin weights from BFS distances to the source.

    Branches are evaluated in order for each arc i->j: weight 1 when i is the
    source (dist 0), 1/return_param when the arc steps back toward the source,
    1/inout_param when it stays in the same BFS layer, and 1/inout_param
    otherwise (stepping away, or either endpoint unreachable). Pass a
    prebuilt ArcSpace to skip re-indexing.
    """
    if arcs is None:
        arcs = build_arc_space(graph)
    d = np.asarray(dist.dist, dtype=np.int64)
    di, dj = d[arcs.tail], d[arcs.head]
    reachable = (di >= 0) & (dj >= 0)
    w = np.select(
        [reachable & (di == 0), reachable & (di > dj), reachable & (di == dj)],
        [1.0, 1.0 / params.return_param, 1.0 / params.inout_param],
        default=1.0 / params.inout_param,
    )
    return WeightVector(source=dist.source, w=w)


def _as_weight_array(weights: WeightVector | np.ndarray) -> np.ndarray:
    if isinstance(weights, WeightVector):
        return weights.w
    return np.asarray(weights, dtype=np.float64)


def segment_sums(values: np.ndarray, node_ptr: np.ndarray) -> np.ndarray:
    """Sum values over each node's contiguous arc range along the last axis.

    Empty ranges (isolated nodes) sum to exactly zero; np.add.reduceat alone
    would mishandle them, hence the mask.
    """
    starts, ends = node_ptr[:-1], node_ptr[1:]
    nonempty = starts < ends
    out = np.zeros(values.shape[:-1] + (len(starts),), dtype=values.dtype)
    if nonempty.any():
        out[..., nonempty] = np.add.reduceat(values, starts[nonempty], axis=-1)
    return out


def coin_state(arcs: ArcSpace, weights: WeightVector | np.ndarray) -> np.ndarray:
    """Per-node reflection axis: sqrt(w_a) normalized within each node's arcs.

    Supports a batch of weight rows with shape (..., arc_count).
    """
    w = _as_weight_array(weights)
    totals = segment_sums(w, arcs.node_ptr)
    return np.sqrt(w / totals[..., arcs.tail])


def initial_state(arcs: ArcSpace, weights: WeightVector | np.ndarray) -> np.ndarray:
    """Superposition over all non-isolated nodes, shaped by the coin weights.

    Each node receives probability mass 1/N_eff, split among its outgoing arcs
    in proportion to their weights (N_eff counts nodes of degree >= 1, so the
    state is exactly normalized even when isolated nodes exist).
    """
    n_eff = int(np.count_nonzero(arcs.node_ptr[1:] > arcs.node_ptr[:-1]))
    if n_eff == 0:
        raise ValueError("graph has no non-isolated nodes")
    return (coin_state(arcs, weights) / np.sqrt(n_eff)).astype(np.complex128)


def localized_state(arcs: ArcSpace, node: int) -> np.ndarray:
    """Equal superposition over one node's outgoing arcs (zero elsewhere)."""
    lo, hi = int(arcs.node_ptr[node]), int(arcs.node_ptr[node + 1])
    if hi == lo:
        raise ValueError(f"node {node} has no outgoing arcs")
    psi = np.zeros(arcs.arc_count, dtype=np.complex128)
    psi[lo:hi] = 1.0 / np.sqrt(hi - lo)
    return psi


def apply_coin(state: np.ndarray, arcs: ArcSpace,
               weights: WeightVector | np.ndarray) -> np.ndarray:
    """Reflect each node's amplitudes about its weighted axis: 2|s><s| - I."""
    return _reflect(state, coin_state(arcs, weights), arcs)


def _reflect(state: np.ndarray, axis: np.ndarray, arcs: ArcSpace) -> np.ndarray:
    # <s|psi> per node in O(arcs), then psi' = 2 s <s|psi> - psi. Broadcasts
    # over leading batch axes of state/axis.
    proj = segment_sums(np.conj(axis) * state, arcs.node_ptr)
    return 2.0 * axis * proj[..., arcs.tail] - state


def apply_shift(state: np.ndarray, arcs: ArcSpace) -> np.ndarray:
    """Flip-flop shift: the amplitude on arc i->j moves to arc j->i."""
    return state[..., arcs.reverse]


def step(state: np.ndarray, arcs: ArcSpace,
         weights: WeightVector | np.ndarray) -> np.ndarray:
    """One walk step: coin then shift. Norm-preserving."""
    return apply_shift(apply_coin(state, arcs, weights), arcs)


def node_probabilities(state: np.ndarray, arcs: ArcSpace) -> np.ndarray:
    """Per-node probability: squared amplitude summed over outgoing arcs."""
    return segment_sums(np.abs(state) ** 2, arcs.node_ptr)


def norm_deviation(state: np.ndarray) -> float:
    """Diagnostic |  ||psi|| - 1 |, worst case over any leading batch axes."""
    norms = np.sqrt(np.sum(np.abs(state) ** 2, axis=-1))
    return float(np.max(np.abs(norms - 1.0)))


def evolve_collect(graph: Graph, arcs: ArcSpace, source: int,
                   params: WalkParams) -> np.ndarray:
    """Run the walk from one source and collect node probabilities per step.

    Returns a (node_count, walk_length) matrix whose column k holds the node
    probabilities after k+1 steps; every column sums to 1 up to the mass lost
    to isolated nodes (which have no arcs and stay at probability 0).
    """
    dist = bfs_distances(graph, source)
    weights = coin_weights(graph, dist, params, arcs=arcs)
    axis = coin_state(arcs, weights)
    psi = initial_state(arcs, weights)
    return _evolve_probabilities(psi, axis, arcs, params.walk_length)


def _evolve_probabilities(psi: np.ndarray, axis: np.ndarray, arcs: ArcSpace,
                          steps: int) -> np.ndarray:
    """Evolve and stack node probabilities; supports batched psi/axis rows.

    Returns (node_count, steps) for 1-D input, (batch, node_count, steps)
    for batched input.
    """
    out = np.empty(psi.shape[:-1] + (arcs.node_count, steps), dtype=np.float64)
    for k in range(steps):
        psi = apply_shift(_reflect(psi, axis, arcs), arcs)
        out[..., k] = node_probabilities(psi, arcs)
    return out


def dense_coin_matrix(arcs: ArcSpace, weights: WeightVector | np.ndarray) -> np.ndarray:
    """Explicit block-diagonal coin matrix (one reflection block per node)."""
    a = arcs.arc_count
    axis = coin_state(arcs, weights)
    coin = -np.eye(a)
    for i in range(arcs.node_count):
        lo, hi = arcs.node_ptr[i], arcs.node_ptr[i + 1]
        block = axis[lo:hi]
        coin[lo:hi, lo:hi] += 2.0 * np.outer(block, block)
    return coin


def dense_shift_matrix(arcs: ArcSpace) -> np.ndarray:
    """Explicit flip-flop permutation matrix."""
    a = arcs.arc_count
    shift = np.zeros((a, a))
    shift[np.arange(a), arcs.reverse] = 1.0
    return shift


def dense_oracle(graph: Graph, source: int, params: WalkParams) -> np.ndarray:
    """Reference evolution via explicit matrices; mirrors evolve_collect.

    Deliberately naive (dense matrix-vector products) so it exercises a
    different code path than the rank-1 kernel. Guarded to small arc spaces.
    """
    arcs = build_arc_space(graph)
    if arcs.arc_count > DENSE_ARC_LIMIT:
        raise ValueError(f"dense oracle limited to {DENSE_ARC_LIMIT} arcs, "
                         f"got {arcs.arc_count}")
    weights = coin_weights(graph, bfs_distances(graph, source), params, arcs=arcs)
    one_step = dense_shift_matrix(arcs) @ dense_coin_matrix(arcs, weights)
    psi = initial_state(arcs, weights)
    out = np.empty((arcs.node_count, params.walk_length))
    for k in range(params.walk_length):
        psi = one_step @ psi
        out[:, k] = node_probabilities(psi, arcs)
    return out
