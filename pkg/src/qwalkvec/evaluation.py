"""Node-classification protocol and diagnostic experiments.

The protocol: repeatedly sample a random train/test split, fit a one-vs-rest
L2-regularized logistic regression on raw features, and report mean and
standard deviation of micro and macro F1 over the repeats. Everything is
deterministic given the seed; repeats and grid cells derive their own PRNG
streams from (seed, index).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from .graph import Graph, LabelMap
from .qwalk import WalkParams, build_arc_space, localized_state, node_probabilities, step
from .embed import per_source_features, qwalkvec
from . import baselines


@dataclass(frozen=True)
class SplitSpec:
    """Repeated-random-split protocol parameters."""

    train_ratio: float
    repeats: int = 20
    seed: int = 42

    def __post_init__(self) -> None:
        if not 0.0 < self.train_ratio < 1.0:
            raise ValueError(f"train_ratio must be in (0,1), got {self.train_ratio}")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")


@dataclass(frozen=True)
class OvrModel:
    """One binary logistic model per class: weights (classes, dim) + biases."""

    weights: np.ndarray
    biases: np.ndarray
    reg_strength: float


@dataclass(frozen=True)
class EvalReport:
    train_ratio: float
    repeats: int
    seed: int
    micro_mean: float
    micro_std: float
    macro_mean: float
    macro_std: float
    micro_scores: tuple[float, ...] = field(repr=False, default=())
    macro_scores: tuple[float, ...] = field(repr=False, default=())


def split(labels: LabelMap, spec: SplitSpec, repeat_index: int) -> tuple[np.ndarray, np.ndarray]:
    """Random train/test node split, deterministic in (seed, repeat_index).

    Train size is round-half-up(train_ratio * N). Both sides must be
    nonempty or ValueError is raised.
    """
    n = len(labels.labels)
    n_train = int(np.floor(spec.train_ratio * n + 0.5))
    if n_train < 1 or n_train >= n:
        raise ValueError(f"degenerate split: {n_train} train of {n} nodes")
    perm = np.random.default_rng([spec.seed, repeat_index]).permutation(n)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def logreg_loss_grad(params: np.ndarray, features: np.ndarray, targets: np.ndarray,
                     reg_strength: float) -> tuple[float, np.ndarray]:
    """Binary logistic loss and gradient; params = [weights..., bias].

    targets are +-1. The L2 penalty is ||w||^2 / (2 * reg_strength) and the
    bias is unregularized.
    """
    w, b = params[:-1], params[-1]
    margins = targets * (features @ w + b)
    loss = np.sum(np.logaddexp(0.0, -margins)) + w @ w / (2.0 * reg_strength)
    coef = -targets * expit(-margins)
    grad = np.empty_like(params)
    grad[:-1] = features.T @ coef + w / reg_strength
    grad[-1] = coef.sum()
    return float(loss), grad


def train_ovr_logreg(features: np.ndarray, labels: LabelMap,
                     train_ids: np.ndarray, reg_strength: float = 1.0) -> OvrModel:
    """Fit one binary logistic regression per class on the training rows.

    Deterministic quasi-Newton minimization (L-BFGS-B from a zero start),
    stopping at max-norm gradient < 1e-6 or 1000 iterations. A class absent
    from the training rows simply converges to a constant-negative model.
    """
    x = np.asarray(features, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("features contain non-finite values")
    y = np.asarray(labels.labels)
    x_train = x[train_ids]
    dim = x.shape[1]
    weights = np.empty((labels.label_count, dim))
    biases = np.empty(labels.label_count)
    for cls in range(labels.label_count):
        targets = np.where(y[train_ids] == cls, 1.0, -1.0)
        result = minimize(
            logreg_loss_grad, np.zeros(dim + 1), args=(x_train, targets, reg_strength),
            method="L-BFGS-B", jac=True,
            options={"maxiter": 1000, "gtol": 1e-6, "ftol": 1e-14})
        weights[cls] = result.x[:-1]
        biases[cls] = result.x[-1]
    return OvrModel(weights=weights, biases=biases, reg_strength=reg_strength)


def predict(model: OvrModel, features: np.ndarray) -> np.ndarray:
    """Argmax of per-class linear scores; ties go to the smallest class id."""
    x = np.asarray(features, dtype=np.float64)
    if x.shape[1] != model.weights.shape[1]:
        raise ValueError(f"feature dim {x.shape[1]} does not match model "
                         f"dim {model.weights.shape[1]}")
    return np.argmax(x @ model.weights.T + model.biases, axis=1)


def _confusion_counts(pred: np.ndarray, true: np.ndarray, label_count: int):
    tp = np.zeros(label_count)
    fp = np.zeros(label_count)
    fn = np.zeros(label_count)
    for cls in range(label_count):
        tp[cls] = np.sum((pred == cls) & (true == cls))
        fp[cls] = np.sum((pred == cls) & (true != cls))
        fn[cls] = np.sum((pred != cls) & (true == cls))
    return tp, fp, fn


def micro_f1(pred: np.ndarray, true: np.ndarray, label_count: int | None = None) -> float:
    """Global-count F1 (equals accuracy for single-label multiclass)."""
    pred, true, label_count = _check_scores(pred, true, label_count)
    tp, fp, fn = _confusion_counts(pred, true, label_count)
    denom = 2.0 * tp.sum() + fp.sum() + fn.sum()
    return float(2.0 * tp.sum() / denom) if denom else 0.0


def macro_f1(pred: np.ndarray, true: np.ndarray, label_count: int | None = None) -> float:
    """Unweighted mean of per-class F1; a class absent from both pred and
    true contributes 0 when it is part of the label universe."""
    pred, true, label_count = _check_scores(pred, true, label_count)
    tp, fp, fn = _confusion_counts(pred, true, label_count)
    f1 = np.zeros(label_count)
    denom = 2.0 * tp + fp + fn
    np.divide(2.0 * tp, denom, out=f1, where=denom > 0)
    return float(f1.mean())


def _check_scores(pred, true, label_count):
    pred = np.asarray(pred)
    true = np.asarray(true)
    if pred.shape != true.shape or pred.size == 0:
        raise ValueError("pred/true must be nonempty and the same length")
    if label_count is None:
        label_count = int(max(pred.max(), true.max())) + 1
    return pred, true, label_count


def _rowspace_compress(features: np.ndarray) -> np.ndarray:
    """Project features onto an orthonormal basis of their row space.

    For L2-regularized linear models the optimum weight vector lies in the
    span of the data rows, so replacing X by U*S from a thin SVD (X = U S Vt)
    yields the exact same fitted losses, predictions, and scores while
    shrinking the width from d to at most n. Pure speed optimization for the
    very wide per-source feature matrices.
    """
    u, s, _ = np.linalg.svd(np.asarray(features, dtype=np.float64),
                            full_matrices=False)
    return u * s


def evaluate_protocol(features: np.ndarray, labels: LabelMap,
                      spec: SplitSpec) -> EvalReport:
    """Run split -> fit -> predict -> score for each repeat; report the mean
    and sample standard deviation (0 when repeats == 1). Feature matrices
    wider than their row count are row-space compressed first (an exact
    equivalence for this model family; see _rowspace_compress)."""
    features = np.asarray(features)
    if features.shape[1] > features.shape[0]:
        features = _rowspace_compress(features)
    y = np.asarray(labels.labels)
    micro_scores = []
    macro_scores = []
    for repeat in range(spec.repeats):
        train_ids, test_ids = split(labels, spec, repeat)
        model = train_ovr_logreg(features, labels, train_ids)
        pred = predict(model, features[test_ids])
        micro_scores.append(micro_f1(pred, y[test_ids], labels.label_count))
        macro_scores.append(macro_f1(pred, y[test_ids], labels.label_count))
    micro_arr = np.array(micro_scores)
    macro_arr = np.array(macro_scores)
    ddof = 1 if spec.repeats > 1 else 0
    return EvalReport(
        train_ratio=spec.train_ratio, repeats=spec.repeats, seed=spec.seed,
        micro_mean=float(micro_arr.mean()),
        micro_std=float(micro_arr.std(ddof=ddof)) if spec.repeats > 1 else 0.0,
        macro_mean=float(macro_arr.mean()),
        macro_std=float(macro_arr.std(ddof=ddof)) if spec.repeats > 1 else 0.0,
        micro_scores=tuple(micro_scores), macro_scores=tuple(macro_scores))


@dataclass(frozen=True)
class GridRow:
    params: tuple[float, float]
    label: str
    report: EvalReport


def grid_search(graph: Graph, labels: LabelMap, method: str,
                grid: tuple[float, ...], spec: SplitSpec, walk_length: int,
                embed_seed: int = 42, walks_per_node: int = 80,
                window: int = 10, dim: int = 128,
                features: str = "per-source") -> tuple[GridRow, list[GridRow]]:
    """Evaluate every cell of the Cartesian parameter grid and return
    (best row, full table). Best is the highest mean micro F1; ties go to the
    lexicographically smallest parameter pair. For the quantum method,
    `features` picks the representation ("per-source" or "aggregated")."""
    if not grid:
        raise ValueError("grid is empty")
    rows = []
    for a in grid:
        for b in grid:
            if method == "qwalkvec":
                params = WalkParams(a, b, walk_length)
                if features == "per-source":
                    matrix = per_source_features(graph, params)
                else:
                    matrix = qwalkvec(graph, params)
                features_arr = matrix.values
                label = f"wp={a:g};wq={b:g};t={walk_length}"
            elif method == "node2vec":
                corpus = baselines.biased_walks(
                    graph, walks_per_node, walk_length,
                    baselines.BiasParams(a, b), embed_seed)
                features_arr = baselines.train_skipgram(
                    corpus, dim, window, seed=embed_seed,
                    node_count=graph.node_count).vectors
                label = f"p={a:g};q={b:g};t={walk_length}"
            else:
                raise ValueError(f"grid search does not support method {method!r}")
            rows.append(GridRow(params=(a, b), label=label,
                                report=evaluate_protocol(features_arr, labels, spec)))
    best = max(rows, key=lambda r: (r.report.micro_mean,
                                    tuple(-p for p in r.params)))
    return best, rows


REPORT_HEADER = ("method,dataset,T_R,repeat_count,micro_mean,micro_std,"
                 "macro_mean,macro_std,params,seed")


def report_csv_row(method: str, dataset: str, report: EvalReport,
                   params_label: str) -> str:
    return (f"{method},{dataset},{report.train_ratio:g},{report.repeats},"
            f"{report.micro_mean:.6f},{report.micro_std:.6f},"
            f"{report.macro_mean:.6f},{report.macro_std:.6f},"
            f"{params_label},{report.seed}")


@dataclass(frozen=True)
class SpreadResult:
    steps: np.ndarray
    sigma2_quantum: np.ndarray
    sigma2_classical: np.ndarray
    exponent_quantum: float
    exponent_classical: float


def spread_variance(cycle_size: int, t_max: int, walkers: int = 100_000,
                    seed: int = 42) -> SpreadResult:
    """Positional variance growth on a cycle: quantum walk (unit coin
    weights, localized equal-superposition start) vs a Monte Carlo simple
    random walk. Returns sigma^2 curves for t = 0..t_max and the fitted
    log-log exponents over t in [10, t_max] (or [1, t_max] for short runs).

    The cycle must be odd with cycle_size >= 2*t_max + 1 so neither walk can
    wrap within t_max steps.
    """
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    if cycle_size % 2 == 0 or cycle_size < 2 * t_max + 1:
        raise ValueError(f"need an odd cycle with cycle_size >= {2 * t_max + 1} "
                         f"to rule out wrap-around, got {cycle_size}")

    n = cycle_size
    adjacency = tuple(tuple(sorted(((i - 1) % n, (i + 1) % n))) for i in range(n))
    cycle = Graph(adjacency=adjacency, original_ids=tuple(range(n)))
    arcs = build_arc_space(cycle)
    start = n // 2
    offsets = ((np.arange(n) - start + n // 2) % n) - n // 2

    psi = localized_state(arcs, start)
    ones = np.ones(arcs.arc_count)
    sigma2_q = np.zeros(t_max + 1)
    for t in range(1, t_max + 1):
        psi = step(psi, arcs, ones)
        probs = node_probabilities(psi, arcs)
        mean = probs @ offsets
        sigma2_q[t] = probs @ (offsets ** 2) - mean ** 2

    rng = np.random.default_rng(seed)
    moves = rng.choice((-1, 1), size=(walkers, t_max))
    positions = np.cumsum(moves, axis=1)
    sigma2_c = np.zeros(t_max + 1)
    sigma2_c[1:] = positions.var(axis=0)

    lo = 10 if t_max >= 10 else 1
    ts = np.arange(lo, t_max + 1)
    fit = lambda curve: float(np.polyfit(np.log(ts), np.log(curve[lo:]), 1)[0])
    return SpreadResult(steps=np.arange(t_max + 1),
                        sigma2_quantum=sigma2_q, sigma2_classical=sigma2_c,
                        exponent_quantum=fit(sigma2_q),
                        exponent_classical=fit(sigma2_c))
