"""Quantum-walk node embeddings with classical baselines and evaluation."""
from .graph import (
    Graph,
    LabelMap,
    DistanceVector,
    GraphFormatError,
    UNREACHABLE,
    load_edge_list,
    load_labels,
    bfs_distances,
)
from .qwalk import (
    ArcSpace,
    WalkParams,
    WeightVector,
    build_arc_space,
    coin_weights,
    initial_state,
    apply_coin,
    apply_shift,
    step,
    node_probabilities,
    evolve_collect,
    dense_oracle,
)
from .embed import FeatureMatrix, qwalkvec, write_embedding, read_embedding

__version__ = "0.1.0"

__all__ = [
    "Graph", "LabelMap", "DistanceVector", "GraphFormatError", "UNREACHABLE",
    "load_edge_list", "load_labels", "bfs_distances",
    "ArcSpace", "WalkParams", "WeightVector", "build_arc_space",
    "coin_weights", "initial_state", "apply_coin", "apply_shift", "step",
    "node_probabilities", "evolve_collect", "dense_oracle",
    "FeatureMatrix", "qwalkvec", "write_embedding", "read_embedding",
    "__version__",
]
