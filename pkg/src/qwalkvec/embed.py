"""Aggregated quantum-walk feature matrices and their CSV serialization.

The pipeline runs the walk once per source node and sums the per-source
probability trajectories into a single (node_count, walk_length) feature
matrix: row i is node i's embedding, column k is the step-k probability
snapshot summed over all sources. The whole computation is deterministic;
there is no randomness anywhere.
"""
from __future__ import annotations

import io
import re
from dataclasses import dataclass

import numpy as np

from .graph import Graph, bfs_distances
from . import qwalk
from .qwalk import ArcSpace, WalkParams

#: Sources processed per batch in the vectorized kernel; bounds peak memory
#: at roughly batch * arc_count complex doubles times a few working arrays.
SOURCE_BATCH = 512


@dataclass(frozen=True)
class FeatureMatrix:
    """Node feature matrix with provenance metadata for serialization.

    kind is "aggregated" (summed over sources), "source:<v>" (one source),
    or "baseline" (a dense embedding from the classical methods, in which
    case the walk parameters are NaN and columns are latent dimensions).
    """

    values: np.ndarray
    kind: str
    node_ids: tuple[int, ...]
    return_param: float = float("nan")
    inout_param: float = float("nan")

    @property
    def node_count(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


def qwalkvec(graph: Graph, params: WalkParams,
             arcs: ArcSpace | None = None) -> FeatureMatrix:
    """Aggregate per-source walk trajectories into one feature matrix.

    Sources iterate over nodes of degree >= 1 in ascending order (isolated
    sources would contribute all-zero matrices). Each per-source column sums
    to 1, so each aggregated column sums to the number of sources.
    """
    if arcs is None:
        arcs = qwalk.build_arc_space(graph)
    degrees = np.asarray(graph.degrees())
    sources = np.flatnonzero(degrees > 0)
    if len(sources) == 0:
        raise ValueError("graph has no non-isolated nodes")

    total = np.zeros((graph.node_count, params.walk_length))
    for start in range(0, len(sources), SOURCE_BATCH):
        batch = sources[start:start + SOURCE_BATCH]
        weights = np.stack([
            qwalk.coin_weights(graph, bfs_distances(graph, int(v)), params, arcs=arcs).w
            for v in batch
        ])
        axis = qwalk.coin_state(arcs, weights)
        psi = qwalk.initial_state(arcs, weights)
        # One state row per source; accumulate per step rather than stacking
        # full trajectories, which would be batch * node_count * walk_length.
        for k in range(params.walk_length):
            psi = qwalk.apply_shift(qwalk._reflect(psi, axis, arcs), arcs)
            total[:, k] += qwalk.node_probabilities(psi, arcs).sum(axis=0)

    return FeatureMatrix(values=total, kind="aggregated",
                         node_ids=graph.original_ids,
                         return_param=params.return_param,
                         inout_param=params.inout_param)


def source_features(graph: Graph, source: int, params: WalkParams,
                    arcs: ArcSpace | None = None) -> FeatureMatrix:
    """Feature matrix of a single source run (one normalized column per step)."""
    if arcs is None:
        arcs = qwalk.build_arc_space(graph)
    values = qwalk.evolve_collect(graph, arcs, source, params)
    return FeatureMatrix(values=values, kind=f"source:{source}",
                         node_ids=graph.original_ids,
                         return_param=params.return_param,
                         inout_param=params.inout_param)


def per_source_features(graph: Graph, params: WalkParams,
                        arcs: ArcSpace | None = None) -> FeatureMatrix:
    """Represent each node by its own source run, flattened.

    Row v is the full probability-trajectory table of the walk whose coin
    weights are sourced at v: node_count * walk_length values. This keeps the
    per-source information that the aggregated matrix sums away, and is the
    representation used for the node-classification experiments. Beware the
    quadratic width on larger graphs.
    """
    if arcs is None:
        arcs = qwalk.build_arc_space(graph)
    n = graph.node_count
    steps = params.walk_length
    values = np.empty((n, n, steps))
    for start in range(0, n, SOURCE_BATCH):
        stop = min(start + SOURCE_BATCH, n)
        weights = np.stack([
            qwalk.coin_weights(graph, bfs_distances(graph, v), params, arcs=arcs).w
            for v in range(start, stop)
        ])
        axis = qwalk.coin_state(arcs, weights)
        psi = qwalk.initial_state(arcs, weights)
        for k in range(steps):
            psi = qwalk.apply_shift(qwalk._reflect(psi, axis, arcs), arcs)
            values[start:stop, :, k] = qwalk.node_probabilities(psi, arcs)
    return FeatureMatrix(values=values.reshape(n, n * steps), kind="per-source",
                         node_ids=graph.original_ids,
                         return_param=params.return_param,
                         inout_param=params.inout_param)


_HEADER_RE = re.compile(
    r"^# qwalkvec N=(\d+) t=(\d+) wp=(\S+) wq=(\S+) kind=(\S+)$")


def write_embedding(matrix: FeatureMatrix, sink: io.TextIOBase) -> None:
    """Write the CSV form: a '#' header line, then one "node,v1,...,vt" row
    per node. Values use 17 significant digits, enough to round-trip doubles.
    """
    if not np.all(np.isfinite(matrix.values)):
        raise ValueError("feature matrix contains non-finite values")
    sink.write(f"# qwalkvec N={matrix.node_count} t={matrix.dim} "
               f"wp={matrix.return_param:.17g} wq={matrix.inout_param:.17g} "
               f"kind={matrix.kind}\n")
    for i in range(matrix.node_count):
        row = ",".join(f"{x:.17g}" for x in matrix.values[i])
        sink.write(f"{matrix.node_ids[i]},{row}\n")


def read_embedding(text: str) -> FeatureMatrix:
    """Parse the CSV form back; raises ValueError on malformed input or a
    row/column count that disagrees with the header."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValueError("empty embedding file")
    match = _HEADER_RE.match(lines[0])
    if match is None:
        raise ValueError(f"bad embedding header: {lines[0]!r}")
    n, dim = int(match.group(1)), int(match.group(2))
    wp, wq = float(match.group(3)), float(match.group(4))
    kind = match.group(5)

    rows = lines[1:]
    if len(rows) != n:
        raise ValueError(f"header says N={n} but file has {len(rows)} rows")
    values = np.empty((n, dim))
    node_ids = []
    for i, row in enumerate(rows):
        fields = row.split(",")
        if len(fields) != dim + 1:
            raise ValueError(f"row {i}: expected {dim + 1} fields, got {len(fields)}")
        node_ids.append(int(fields[0]))
        values[i] = [float(x) for x in fields[1:]]
    return FeatureMatrix(values=values, kind=kind, node_ids=tuple(node_ids),
                         return_param=wp, inout_param=wq)
