"""Classical baselines: uniform and second-order biased random walks plus a
compact Skip-gram (negative sampling) trainer.

Walk generation draws from one PRNG stream per (seed, source) pair, so
corpora are reproducible and sources are independent. The Skip-gram trainer
follows the word2vec conventions: per-pair sequential SGD, a per-center
window radius drawn uniformly from 1..window, 5 negatives from the
unigram^0.75 noise distribution, and a linearly decaying learning rate. The
inner loop is compiled with numba; training is single threaded and
deterministic for a fixed seed.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass

import numpy as np
from numba import njit

from .graph import Graph


@dataclass(frozen=True)
class WalkCorpus:
    """A bag of node sequences: walks_per_node walks from every node."""

    walks: list[list[int]]
    walks_per_node: int
    walk_length: int


@dataclass(frozen=True)
class BiasParams:
    """Second-order walk bias: return_param is the weight divisor for going
    back to the previous node, inout_param for leaving its neighborhood."""

    return_param: float
    inout_param: float

    def __post_init__(self) -> None:
        if not (self.return_param > 0 and self.inout_param > 0):
            raise ValueError("bias parameters must be positive")


@dataclass(frozen=True)
class SkipgramModel:
    """Input-side embedding vectors plus the mean pair loss per epoch."""

    vectors: np.ndarray
    epoch_losses: np.ndarray

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def _flat_adjacency(graph: Graph) -> tuple[np.ndarray, np.ndarray]:
    degrees = np.array(graph.degrees(), dtype=np.int64)
    ptr = np.zeros(graph.node_count + 1, dtype=np.int64)
    np.cumsum(degrees, out=ptr[1:])
    flat = np.fromiter((v for nbrs in graph.adjacency for v in nbrs),
                       dtype=np.int64, count=int(ptr[-1]))
    return flat, ptr


def uniform_walks(graph: Graph, walks_per_node: int, walk_length: int,
                  seed: int) -> WalkCorpus:
    """First-order random walks: each step moves to a uniformly random
    neighbor. Walks from isolated nodes stop immediately (length 1)."""
    if walks_per_node < 1 or walk_length < 2:
        raise ValueError("need walks_per_node >= 1 and walk_length >= 2")
    flat, ptr = _flat_adjacency(graph)
    degrees = np.diff(ptr)
    walks: list[list[int]] = []
    for source in range(graph.node_count):
        if degrees[source] == 0:
            walks.extend([source] for _ in range(walks_per_node))
            continue
        rng = np.random.default_rng([seed, source])
        # In an undirected graph a walk can never reach a degree-0 node, so
        # all walks from a non-isolated source run to full length.
        rows = np.empty((walk_length, walks_per_node), dtype=np.int64)
        rows[0] = source
        for k in range(1, walk_length):
            cur = rows[k - 1]
            pick = (rng.random(walks_per_node) * degrees[cur]).astype(np.int64)
            rows[k] = flat[ptr[cur] + pick]
        walks.extend(rows[:, i].tolist() for i in range(walks_per_node))
    return WalkCorpus(walks=walks, walks_per_node=walks_per_node,
                      walk_length=walk_length)


def node2vec_transition(graph: Graph, prev: int, cur: int,
                        bias: BiasParams) -> np.ndarray:
    """Distribution over cur's neighbors given the walker came from prev:
    1/return_param to step back, 1 to a common neighbor of prev, and
    1/inout_param to leave prev's neighborhood, normalized."""
    if cur not in graph.adjacency[prev]:
        raise ValueError(f"{prev} is not adjacent to {cur}")
    prev_nbrs = set(graph.adjacency[prev])
    weights = np.array([
        1.0 / bias.return_param if x == prev
        else 1.0 if x in prev_nbrs
        else 1.0 / bias.inout_param
        for x in graph.adjacency[cur]
    ])
    return weights / weights.sum()


def biased_walks(graph: Graph, walks_per_node: int, walk_length: int,
                 bias: BiasParams, seed: int) -> WalkCorpus:
    """Second-order biased walks; the first step is uniform over neighbors."""
    if walks_per_node < 1 or walk_length < 2:
        raise ValueError("need walks_per_node >= 1 and walk_length >= 2")
    flat, ptr = _flat_adjacency(graph)
    degrees = np.diff(ptr)

    # Per-arc transition CDFs: arc (prev -> cur) sits at ptr[prev] + rank of
    # cur among prev's neighbors, and after stepping to rank r within cur's
    # list the next arc index is ptr[cur] + r.
    cdfs: list[np.ndarray] = []
    for prev in range(graph.node_count):
        for cur in graph.adjacency[prev]:
            probs = node2vec_transition(graph, prev, cur, bias)
            cdfs.append(np.cumsum(probs))

    walks: list[list[int]] = []
    for source in range(graph.node_count):
        if degrees[source] == 0:
            walks.extend([source] for _ in range(walks_per_node))
            continue
        rng = np.random.default_rng([seed, source])
        for _ in range(walks_per_node):
            rank = int(rng.random() * degrees[source])
            arc = int(ptr[source]) + rank
            walk = [source, int(flat[arc])]
            while len(walk) < walk_length:
                cdf = cdfs[arc]
                rank = bisect_left(cdf, rng.random())
                rank = min(rank, len(cdf) - 1)
                cur = walk[-1]
                arc = int(ptr[cur]) + rank
                walk.append(int(flat[arc]))
            walks.append(walk)
    return WalkCorpus(walks=walks, walks_per_node=walks_per_node,
                      walk_length=walk_length)


def write_corpus(corpus: WalkCorpus, sink) -> None:
    """One walk per line, space-separated node ids."""
    for walk in corpus.walks:
        sink.write(" ".join(str(v) for v in walk) + "\n")


def read_corpus(text: str, walks_per_node: int, walk_length: int) -> WalkCorpus:
    walks = [[int(tok) for tok in line.split()]
             for line in text.splitlines() if line.strip()]
    return WalkCorpus(walks=walks, walks_per_node=walks_per_node,
                      walk_length=walk_length)


def negative_sampling_loss(center: np.ndarray, context: np.ndarray,
                           negatives: np.ndarray):
    """Loss and analytic gradients for one (center, context, negatives)
    sample: -log sigmoid(u_ctx . v) - sum_n log sigmoid(-u_n . v).

    Returns (loss, grad_center, grad_context, grad_negatives).
    """
    sig_pos = _sigmoid(float(np.dot(context, center)))
    sig_negs = np.array([_sigmoid(float(np.dot(u, center))) for u in negatives])
    loss = -np.log(max(sig_pos, 1e-12)) - np.sum(np.log(np.maximum(1.0 - sig_negs, 1e-12)))
    grad_center = (sig_pos - 1.0) * context + sig_negs @ negatives
    grad_context = (sig_pos - 1.0) * center
    grad_negatives = sig_negs[:, None] * center[None, :]
    return loss, grad_center, grad_context, grad_negatives


def _sigmoid(x: float) -> float:
    if x > 30.0:
        return 1.0
    if x < -30.0:
        return 0.0
    return 1.0 / (1.0 + np.exp(-x))


@njit(cache=True)
def _sgns_pair(w_in, w_out, center, targets, labels, alpha, work):
    """One sequential SGD step on a (center, positive+negatives) sample.

    Output vectors update inside the loop; the center update accumulates in
    `work` and lands after the loop, as in word2vec. Returns the pair loss.
    """
    d = w_in.shape[1]
    for j in range(d):
        work[j] = 0.0
    loss = 0.0
    for k in range(targets.shape[0]):
        t = targets[k]
        label = labels[k]
        f = 0.0
        for j in range(d):
            f += w_in[center, j] * w_out[t, j]
        if f > 30.0:
            sig = 1.0
        elif f < -30.0:
            sig = 0.0
        else:
            sig = 1.0 / (1.0 + np.exp(-f))
        if label > 0.5:
            loss -= np.log(max(sig, 1e-12))
        else:
            loss -= np.log(max(1.0 - sig, 1e-12))
        g = alpha * (label - sig)
        for j in range(d):
            work[j] += g * w_out[t, j]
            w_out[t, j] += g * w_in[center, j]
    for j in range(d):
        w_in[center, j] += work[j]
    return loss


@njit(cache=True)
def _sgns_train(tokens, offsets, w_in, w_out, noise_cdf, window, n_negative,
                epochs, lr, seed):
    np.random.seed(seed)
    n_tokens = tokens.shape[0]
    total = max(n_tokens * epochs, 1)
    processed = 0
    vocab = noise_cdf.shape[0]
    targets = np.empty(n_negative + 1, dtype=np.int64)
    labels = np.zeros(n_negative + 1)
    labels[0] = 1.0
    work = np.empty(w_in.shape[1])
    epoch_losses = np.zeros(epochs)

    for epoch in range(epochs):
        loss_sum = 0.0
        pair_count = 0
        for wi in range(offsets.shape[0] - 1):
            start, end = offsets[wi], offsets[wi + 1]
            for ci in range(start, end):
                alpha = lr * max(1.0 - processed / total, 1e-4)
                processed += 1
                radius = 1 + int(np.random.random() * window)
                lo = max(start, ci - radius)
                hi = min(end, ci + radius + 1)
                for pos in range(lo, hi):
                    if pos == ci:
                        continue
                    context = tokens[pos]
                    targets[0] = context
                    filled = 1
                    while filled < n_negative + 1:
                        u = np.random.random()
                        t = min(np.searchsorted(noise_cdf, u, side="right"), vocab - 1)
                        if t == context:
                            continue
                        targets[filled] = t
                        filled += 1
                    loss_sum += _sgns_pair(w_in, w_out, tokens[ci], targets,
                                           labels, alpha, work)
                    pair_count += 1
        epoch_losses[epoch] = loss_sum / max(pair_count, 1)
    return epoch_losses


def train_skipgram(corpus: WalkCorpus, dim: int, window: int,
                   negatives: int = 5, epochs: int = 5, lr: float = 0.025,
                   seed: int = 0, node_count: int | None = None) -> SkipgramModel:
    """Train Skip-gram with negative sampling on a walk corpus and return the
    input-side vectors (one row per node id)."""
    if not corpus.walks:
        raise ValueError("corpus is empty")
    if dim < 2 or window < 1:
        raise ValueError("need dim >= 2 and window >= 1")

    lengths = np.array([len(w) for w in corpus.walks], dtype=np.int64)
    offsets = np.zeros(len(lengths) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    tokens = np.fromiter((v for walk in corpus.walks for v in walk),
                         dtype=np.int64, count=int(offsets[-1]))
    vocab = int(tokens.max()) + 1 if node_count is None else node_count

    counts = np.bincount(tokens, minlength=vocab).astype(np.float64)
    noise = counts ** 0.75
    noise_cdf = np.cumsum(noise / noise.sum())
    noise_cdf[-1] = 1.0

    rng = np.random.default_rng(seed)
    w_in = (rng.random((vocab, dim)) - 0.5) / dim
    w_out = np.zeros((vocab, dim))
    epoch_losses = _sgns_train(tokens, offsets, w_in, w_out, noise_cdf,
                               window, negatives, epochs, lr, seed)
    return SkipgramModel(vectors=w_in, epoch_losses=epoch_losses)
