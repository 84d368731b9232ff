import io

import numpy as np
import pytest

import qwalkvec as qv
from qwalkvec.embed import FeatureMatrix, per_source_features, source_features


class TestAggregated:
    def test_k2_all_entries_one(self, k2):
        fm = qv.qwalkvec(k2, qv.WalkParams(2.0, 4.0, 3))
        assert fm.kind == "aggregated"
        assert np.allclose(fm.values, 1.0)

    def test_column_sums_equal_source_count(self, karate_graph):
        fm = qv.qwalkvec(karate_graph, qv.WalkParams(0.25, 1.0, 40))
        assert np.max(np.abs(fm.values.sum(axis=0) - 34)) < 1e-6

    def test_isolated_nodes_zero_rows(self):
        g = qv.load_edge_list("0 1\n1 2\n3 4")
        # make node 5 isolated via a dangling self-loop line
        g = qv.load_edge_list("0 1\n1 2\n3 4\n5 5")
        fm = qv.qwalkvec(g, qv.WalkParams(1.0, 1.0, 5))
        assert np.all(fm.values[5] == 0.0)
        assert np.max(np.abs(fm.values.sum(axis=0) - 5)) < 1e-6

    def test_matches_per_source_sum(self, path3):
        params = qv.WalkParams(0.5, 2.0, 8)
        arcs = qv.build_arc_space(path3)
        expected = sum(qv.evolve_collect(path3, arcs, v, params) for v in range(3))
        fm = qv.qwalkvec(path3, params)
        assert np.max(np.abs(fm.values - expected)) < 1e-12

    def test_two_components_match_dense_oracle(self):
        g = qv.load_edge_list("0 1\n1 2\n3 4")
        params = qv.WalkParams(2.0, 0.5, 6)
        expected = sum(qv.dense_oracle(g, v, params) for v in range(5))
        fm = qv.qwalkvec(g, params)
        assert np.max(np.abs(fm.values - expected)) < 1e-9

    def test_deterministic(self, karate_graph):
        params = qv.WalkParams(0.25, 4.0, 20)
        a = qv.qwalkvec(karate_graph, params).values
        b = qv.qwalkvec(karate_graph, params).values
        assert np.array_equal(a, b)

    def test_permutation_equivariance(self, karate_graph):
        rng = np.random.default_rng(11)
        perm = rng.permutation(karate_graph.node_count)
        relabeled = ["{} {}".format(perm[u], perm[v])
                     for u, nbrs in enumerate(karate_graph.adjacency)
                     for v in nbrs if u < v]
        g2 = qv.load_edge_list("\n".join(relabeled))
        # g2 node with original id perm[u] corresponds to karate node u
        params = qv.WalkParams(0.5, 2.0, 15)
        base = qv.qwalkvec(karate_graph, params).values
        shuffled = qv.qwalkvec(g2, params).values
        back = {orig: row for orig, row in zip(g2.original_ids, shuffled)}
        aligned = np.stack([back[perm[u]] for u in range(34)])
        assert np.max(np.abs(aligned - base)) < 1e-9


class TestPerSource:
    def test_rows_are_flattened_source_runs(self, path3):
        params = qv.WalkParams(2.0, 4.0, 6)
        arcs = qv.build_arc_space(path3)
        fm = per_source_features(path3, params)
        assert fm.kind == "per-source"
        assert fm.values.shape == (3, 3 * 6)
        for v in range(3):
            expected = qv.evolve_collect(path3, arcs, v, params).ravel()
            assert np.max(np.abs(fm.values[v] - expected)) < 1e-12

    def test_single_source_wrapper(self, path3):
        fm = source_features(path3, 1, qv.WalkParams(1.0, 1.0, 4))
        assert fm.kind == "source:1"
        assert fm.values.shape == (3, 4)


class TestEmbeddingIO:
    def test_round_trip_bitwise(self, karate_graph):
        fm = qv.qwalkvec(karate_graph, qv.WalkParams(0.25, 1.0, 10))
        sink = io.StringIO()
        qv.write_embedding(fm, sink)
        again = qv.read_embedding(sink.getvalue())
        assert np.array_equal(again.values, fm.values)
        assert again.node_ids == fm.node_ids
        assert again.kind == fm.kind
        assert again.return_param == fm.return_param

    def test_header_fields(self, k2):
        fm = qv.qwalkvec(k2, qv.WalkParams(0.25, 1.0, 3))
        sink = io.StringIO()
        qv.write_embedding(fm, sink)
        header = sink.getvalue().splitlines()[0]
        assert header == "# qwalkvec N=2 t=3 wp=0.25 wq=1 kind=aggregated"

    def test_row_count_mismatch_rejected(self, k2):
        fm = qv.qwalkvec(k2, qv.WalkParams(1.0, 1.0, 3))
        sink = io.StringIO()
        qv.write_embedding(fm, sink)
        truncated = "\n".join(sink.getvalue().splitlines()[:-1])
        with pytest.raises(ValueError, match="rows"):
            qv.read_embedding(truncated)

    def test_column_count_mismatch_rejected(self):
        text = "# qwalkvec N=1 t=3 wp=1 wq=1 kind=aggregated\n0,1.0,2.0\n"
        with pytest.raises(ValueError, match="fields"):
            qv.read_embedding(text)

    def test_bad_header_rejected(self):
        with pytest.raises(ValueError, match="header"):
            qv.read_embedding("nonsense\n0,1.0\n")

    def test_non_finite_rejected(self):
        fm = FeatureMatrix(values=np.array([[np.inf]]), kind="aggregated",
                           node_ids=(0,))
        with pytest.raises(ValueError, match="finite"):
            qv.write_embedding(fm, io.StringIO())

    def test_baseline_kind_round_trip(self):
        fm = FeatureMatrix(values=np.array([[0.5, -1.25], [3.0, 2.0]]),
                           kind="baseline", node_ids=(10, 20))
        sink = io.StringIO()
        qv.write_embedding(fm, sink)
        again = qv.read_embedding(sink.getvalue())
        assert again.kind == "baseline"
        assert np.isnan(again.return_param)
        assert np.array_equal(again.values, fm.values)
