import numpy as np
import pytest
from hypothesis import given, strategies as st

import qwalkvec as qv
from qwalkvec import evaluation as ev
from qwalkvec.graph import LabelMap


def label_map(values):
    values = list(values)
    dense = {}
    labels = []
    for v in values:
        dense.setdefault(v, len(dense))
        labels.append(dense[v])
    return LabelMap(labels=tuple(labels), label_count=len(dense),
                    original_values=tuple(dense))


def toy_blobs(per_class=20, gap=3.0, dim=2, seed=0):
    rng = np.random.default_rng(seed)
    x = np.vstack([rng.normal(0, 0.15, (per_class, dim)) + [gap, 0],
                   rng.normal(0, 0.15, (per_class, dim)) - [gap, 0]])
    lm = label_map([0] * per_class + [1] * per_class)
    return x, lm


class TestSplit:
    def test_train_size_rounding(self):
        lm = label_map(range(2)) if False else label_map([0, 1] * 17)
        spec = ev.SplitSpec(train_ratio=0.5, repeats=1, seed=0)
        train, test = ev.split(lm, spec, 0)
        assert len(train) == 17
        assert len(test) == 17

    def test_deterministic_per_repeat(self):
        lm = label_map([0, 1] * 10)
        spec = ev.SplitSpec(train_ratio=0.3, repeats=5, seed=9)
        a = ev.split(lm, spec, 2)
        b = ev.split(lm, spec, 2)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
        c = ev.split(lm, spec, 3)
        assert not np.array_equal(a[0], c[0])

    def test_partition_of_all_nodes(self):
        lm = label_map([0, 1, 2] * 9)
        train, test = ev.split(lm, ev.SplitSpec(0.6, 1, 4), 0)
        union = np.sort(np.concatenate([train, test]))
        assert np.array_equal(union, np.arange(27))
        assert len(np.intersect1d(train, test)) == 0

    def test_degenerate_split_rejected(self):
        lm = label_map([0, 1])
        with pytest.raises(ValueError, match="degenerate"):
            ev.split(lm, ev.SplitSpec(0.1, 1, 0), 0)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            ev.SplitSpec(train_ratio=1.5, repeats=1, seed=0)
        with pytest.raises(ValueError):
            ev.SplitSpec(train_ratio=0.5, repeats=0, seed=0)


class TestLogreg:
    def test_separable_training_accuracy(self):
        x, lm = toy_blobs()
        model = ev.train_ovr_logreg(x, lm, np.arange(40))
        pred = ev.predict(model, x)
        assert np.array_equal(pred, np.array(lm.labels))

    def test_single_class_train_predicts_it(self):
        x, lm = toy_blobs()
        train = np.arange(20)  # class 0 only
        model = ev.train_ovr_logreg(x, lm, train)
        assert np.all(ev.predict(model, x[:25]) == 0)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=(15, 6))
        y = rng.choice([-1.0, 1.0], 15)
        params = rng.normal(size=7)
        _, grad = ev.logreg_loss_grad(params, x, y, 1.0)
        eps = 1e-6
        for k in range(7):
            e = np.zeros(7)
            e[k] = eps
            hi = ev.logreg_loss_grad(params + e, x, y, 1.0)[0]
            lo = ev.logreg_loss_grad(params - e, x, y, 1.0)[0]
            fd = (hi - lo) / (2 * eps)
            assert abs(fd - grad[k]) / max(abs(grad[k]), 1e-9) < 1e-6

    def test_non_finite_rejected(self):
        x, lm = toy_blobs()
        x[0, 0] = np.nan
        with pytest.raises(ValueError, match="finite"):
            ev.train_ovr_logreg(x, lm, np.arange(40))

    def test_predict_dimension_mismatch(self):
        x, lm = toy_blobs()
        model = ev.train_ovr_logreg(x, lm, np.arange(40))
        with pytest.raises(ValueError, match="dim"):
            ev.predict(model, np.zeros((3, 5)))

    def test_predict_tie_breaks_to_smallest_class(self):
        model = ev.OvrModel(weights=np.zeros((3, 2)), biases=np.zeros(3),
                            reg_strength=1.0)
        assert np.all(ev.predict(model, np.ones((4, 2))) == 0)


class TestF1:
    def test_perfect_scores(self):
        pred = np.array([0, 1, 2, 1])
        assert ev.micro_f1(pred, pred) == 1.0
        assert ev.macro_f1(pred, pred) == 1.0

    def test_hand_computed_example(self):
        true = np.array([0, 0, 1, 1])
        pred = np.array([0, 1, 1, 1])
        assert ev.micro_f1(pred, true) == pytest.approx(0.75)
        assert ev.macro_f1(pred, true) == pytest.approx((2 / 3 + 0.8) / 2)

    def test_absent_class_counts_zero(self):
        true = np.array([0, 0, 1])
        pred = np.array([0, 0, 1])
        assert ev.macro_f1(pred, true, label_count=3) == pytest.approx(2 / 3)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            ev.micro_f1(np.array([]), np.array([]))

    @given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)),
                    min_size=1, max_size=60))
    def test_micro_equals_accuracy(self, pairs):
        pred = np.array([p for p, _ in pairs])
        true = np.array([t for _, t in pairs])
        assert ev.micro_f1(pred, true) == pytest.approx((pred == true).mean())


class TestProtocol:
    def test_single_repeat_zero_std(self):
        x, lm = toy_blobs()
        report = ev.evaluate_protocol(x, lm, ev.SplitSpec(0.5, 1, 3))
        assert report.micro_std == 0.0
        assert report.repeats == 1

    def test_deterministic(self):
        x, lm = toy_blobs(seed=5)
        spec = ev.SplitSpec(0.6, 5, 11)
        a = ev.evaluate_protocol(x, lm, spec)
        b = ev.evaluate_protocol(x, lm, spec)
        assert a == b

    def test_class_permutation_invariance(self):
        rng = np.random.default_rng(8)
        x = rng.normal(size=(30, 4))
        values = rng.integers(0, 3, 30)
        lm_a = label_map(values)
        lm_b = label_map((values + 1) % 3)
        spec = ev.SplitSpec(0.5, 6, 2)
        a = ev.evaluate_protocol(x, lm_a, spec)
        b = ev.evaluate_protocol(x, lm_b, spec)
        assert a.micro_mean == pytest.approx(b.micro_mean)
        assert a.macro_mean == pytest.approx(b.macro_mean)

    def test_rowspace_compression_is_exact(self):
        rng = np.random.default_rng(21)
        x = rng.normal(size=(25, 60))
        lm = label_map(rng.integers(0, 2, 25))
        spec = ev.SplitSpec(0.6, 8, 7)
        wide = ev.evaluate_protocol(x, lm, spec)
        tall = ev.evaluate_protocol(ev._rowspace_compress(x), lm, spec)
        assert wide.micro_scores == pytest.approx(tall.micro_scores)


class TestGridSearch:
    def test_table_size_and_determinism(self, karate_graph, karate_labels):
        spec = ev.SplitSpec(0.5, 3, 1)
        grid = (0.5, 2.0)
        best, rows = ev.grid_search(karate_graph, karate_labels, "qwalkvec",
                                    grid, spec, walk_length=10)
        assert len(rows) == 4
        best2, rows2 = ev.grid_search(karate_graph, karate_labels, "qwalkvec",
                                      grid, spec, walk_length=10)
        assert best.label == best2.label
        assert [r.report for r in rows] == [r.report for r in rows2]

    def test_singleton_grid(self, karate_graph, karate_labels):
        spec = ev.SplitSpec(0.5, 2, 1)
        best, rows = ev.grid_search(karate_graph, karate_labels, "qwalkvec",
                                    (1.0,), spec, walk_length=5)
        assert len(rows) == 1
        assert best is rows[0]

    def test_empty_grid_rejected(self, karate_graph, karate_labels):
        with pytest.raises(ValueError):
            ev.grid_search(karate_graph, karate_labels, "qwalkvec", (),
                           ev.SplitSpec(0.5, 1, 0), walk_length=5)

    def test_unknown_method_rejected(self, karate_graph, karate_labels):
        with pytest.raises(ValueError, match="method"):
            ev.grid_search(karate_graph, karate_labels, "deepwalk", (1.0,),
                           ev.SplitSpec(0.5, 1, 0), walk_length=5)


class TestSpread:
    def test_zero_variance_at_start(self):
        result = ev.spread_variance(41, 10, walkers=2000, seed=1)
        assert result.sigma2_quantum[0] == 0.0
        assert result.sigma2_classical[0] == 0.0

    def test_exponents(self):
        result = ev.spread_variance(201, 80, walkers=50_000, seed=2)
        assert result.exponent_quantum > 1.6
        assert abs(result.exponent_classical - 1.0) < 0.2
        assert result.exponent_quantum > result.exponent_classical

    def test_wraparound_guard(self):
        with pytest.raises(ValueError, match="cycle"):
            ev.spread_variance(100, 80)    # even
        with pytest.raises(ValueError, match="cycle"):
            ev.spread_variance(101, 80)    # too small


class TestReportCsv:
    def test_row_format(self):
        report = ev.EvalReport(train_ratio=0.5, repeats=3, seed=7,
                               micro_mean=0.5, micro_std=0.1,
                               macro_mean=0.4, macro_std=0.2)
        row = ev.report_csv_row("qwalkvec", "karate", report, "wp=1;wq=2")
        assert row == ("qwalkvec,karate,0.5,3,0.500000,0.100000,"
                       "0.400000,0.200000,wp=1;wq=2,7")
