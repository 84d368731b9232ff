from pathlib import Path

import hypothesis
import numpy as np
import pytest

import qwalkvec as qv

hypothesis.settings.register_profile(
    "default", deadline=None, max_examples=50)
hypothesis.settings.load_profile("default")

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def karate_graph():
    return qv.load_edge_list((DATA_DIR / "karate.edges").read_text())


@pytest.fixture(scope="session")
def karate_labels(karate_graph):
    return qv.load_labels((DATA_DIR / "karate.labels").read_text(), karate_graph)


@pytest.fixture(scope="session")
def webkb_graph():
    return qv.load_edge_list((DATA_DIR / "webkb.edges").read_text())


@pytest.fixture(scope="session")
def webkb_labels(webkb_graph):
    return qv.load_labels((DATA_DIR / "webkb.labels").read_text(), webkb_graph)


@pytest.fixture
def path3():
    return qv.load_edge_list("0 1\n1 2")


@pytest.fixture
def k2():
    return qv.load_edge_list("0 1")


@pytest.fixture
def triangle():
    return qv.load_edge_list("0 1\n1 2\n0 2")


@pytest.fixture
def star4():
    # center 0 with three leaves
    return qv.load_edge_list("0 1\n0 2\n0 3")


def random_graph_text(rng: np.random.Generator, max_nodes: int = 24,
                      edge_prob: float | None = None) -> str:
    """Random connected-ish simple graph as edge-list text (>= 1 edge)."""
    n = int(rng.integers(2, max_nodes + 1))
    if edge_prob is None:
        edge_prob = min(1.0, (1.0 + rng.random() * 2.5) / max(n - 1, 1))
    lines = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                lines.append(f"{i} {j}")
    if not lines:
        lines.append(f"0 {int(rng.integers(1, n))}")
    return "\n".join(lines)
