"""Labeled undirected graphs: loading, validation, and BFS distances.

Graphs are canonicalized on load: node ids are remapped to 0..N-1 in
first-appearance order (the original ids are kept for output), neighbor
lists are sorted, and self-loops / duplicate edges are dropped.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass

log = logging.getLogger(__name__)

#: Marker for nodes with no path from the BFS source. Kept distinct from any
#: valid distance so callers can branch on reachability explicitly.
UNREACHABLE = -1


class GraphFormatError(ValueError):
    """Raised when an edge-list or label file cannot be parsed or validated."""


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph over canonical node ids 0..N-1.

    adjacency[i] is the ascending tuple of neighbors of node i;
    original_ids[i] is the id node i carried in the input file.
    """

    adjacency: tuple[tuple[int, ...], ...]
    original_ids: tuple[int, ...]

    @property
    def node_count(self) -> int:
        return len(self.adjacency)

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    def degree(self, node: int) -> int:
        return len(self.adjacency[node])

    def degrees(self) -> tuple[int, ...]:
        return tuple(len(nbrs) for nbrs in self.adjacency)

    def to_edge_list_text(self) -> str:
        """Serialize as canonical edge-list text (one "u v" line per edge, u < v)."""
        lines = []
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    lines.append(f"{u} {v}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class LabelMap:
    """One integer label per node, densified to 0..M-1.

    original_values[m] is the raw label value that was densified to m.
    """

    labels: tuple[int, ...]
    label_count: int
    original_values: tuple[int, ...]


@dataclass(frozen=True)
class DistanceVector:
    """BFS shortest distances from a single source; UNREACHABLE where no path exists."""

    source: int
    dist: tuple[int, ...]


def load_edge_list(text: str) -> Graph:
    """Parse edge-list text ("u v" per line, '#' comments) into a canonical Graph.

    Inputs whose ids are already contiguous 0..N-1 keep them (so loading a
    serialized graph is the identity); any other id set is remapped to
    0..N-1 in first-appearance order, with the original ids recorded.
    Self-loops and duplicate edges are dropped; their counts are reported on
    the diagnostics logger. Raises GraphFormatError on malformed tokens (with
    the line number) or an empty edge set.
    """
    seen: dict[int, None] = {}
    raw_edges: set[tuple[int, int]] = set()
    self_loops = 0
    duplicates = 0
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {raw_line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: malformed integer in {raw_line!r}") from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"line {lineno}: negative node id in {raw_line!r}")
        seen.setdefault(u)
        seen.setdefault(v)
        if u == v:
            self_loops += 1
            continue
        key = (u, v) if u < v else (v, u)
        if key in raw_edges:
            duplicates += 1
            continue
        raw_edges.add(key)

    if not raw_edges:
        raise GraphFormatError("edge list contains no usable edges")
    if self_loops or duplicates:
        log.warning("load_edge_list: dropped %d self-loop(s) and %d duplicate edge(s)",
                    self_loops, duplicates)

    n = len(seen)
    if set(seen) == set(range(n)):
        original = list(range(n))
        id_of = {i: i for i in range(n)}
    else:
        original = list(seen)
        id_of = {raw: i for i, raw in enumerate(original)}

    neighbors: list[list[int]] = [[] for _ in range(n)]
    for u, v in raw_edges:
        neighbors[id_of[u]].append(id_of[v])
        neighbors[id_of[v]].append(id_of[u])
    adjacency = tuple(tuple(sorted(nbrs)) for nbrs in neighbors)
    return Graph(adjacency=adjacency, original_ids=tuple(original))


def load_labels(text: str, graph: Graph) -> LabelMap:
    """Parse label text ("node label" per line) for the given graph.

    Node ids refer to the input file's original ids. Every graph node must be
    labeled exactly once; label values are densified to 0..M-1 in
    first-appearance order. Raises GraphFormatError on missing, duplicate, or
    unknown nodes.
    """
    raw = parse_label_lines(text)
    id_of = {orig: i for i, orig in enumerate(graph.original_ids)}

    unknown = [orig for orig in raw if orig not in id_of]
    if unknown:
        raise GraphFormatError(f"label file references unknown node id(s): {sorted(unknown)[:5]}")
    missing = [orig for orig in graph.original_ids if orig not in raw]
    if missing:
        raise GraphFormatError(f"label file is missing node(s): {sorted(missing)[:5]}")

    dense_of: dict[int, int] = {}
    values: list[int] = []
    labels = [0] * graph.node_count
    # Densify in the file's appearance order for reproducibility.
    for orig, value in raw.items():
        dense = dense_of.get(value)
        if dense is None:
            dense = len(values)
            dense_of[value] = dense
            values.append(value)
        labels[id_of[orig]] = dense

    if len(values) < 2:
        raise GraphFormatError("label file must contain at least two distinct labels")
    return LabelMap(labels=tuple(labels), label_count=len(values),
                    original_values=tuple(values))


def parse_label_lines(text: str) -> dict[int, int]:
    """Parse "node label" lines into an ordered {node: label} dict.

    Shared by graph-based loading and embedding-file evaluation, which has no
    Graph in hand. Raises GraphFormatError on malformed lines or duplicates.
    """
    raw: dict[int, int] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'node label', got {raw_line!r}")
        try:
            node, value = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: malformed integer in {raw_line!r}") from None
        if node in raw:
            raise GraphFormatError(f"line {lineno}: duplicate label for node {node}")
        raw[node] = value
    return raw


def bfs_distances(graph: Graph, source: int) -> DistanceVector:
    """Unweighted BFS distances from source; unreachable nodes get UNREACHABLE."""
    n = graph.node_count
    if not 0 <= source < n:
        raise ValueError(f"source {source} out of range for {n} nodes")
    dist = [UNREACHABLE] * n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in graph.adjacency[u]:
            if dist[v] == UNREACHABLE:
                dist[v] = dist[u] + 1
                queue.append(v)
    return DistanceVector(source=source, dist=tuple(dist))
