"""Command-line interface: embed, evaluate, gridsearch, and spread.

Every successful command writes its output file plus a JSON manifest
(<out>.manifest.json) holding the fully resolved arguments; re-running with
--config <manifest> reproduces the outputs byte for byte. A config file maps
one-to-one onto flags and explicit flags win on conflict.

Exit codes: 0 success, 1 data error (unreadable or inconsistent inputs),
2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, baselines, embed, evaluation, graph
from .qwalk import WalkParams

COMMANDS = ("embed", "evaluate", "gridsearch", "spread")

GRID_DEFAULT = "0.25,0.5,1,2,4"


class DataError(Exception):
    """Input data is unreadable or inconsistent (exit code 1)."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwalkvec",
        description="Quantum-walk node embeddings, baselines, and evaluation")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="compute a node embedding")
    p.add_argument("--edges", required=True, help="edge-list file")
    p.add_argument("--method", required=True,
                   choices=["qwalkvec", "deepwalk", "node2vec"])
    p.add_argument("--t", type=int, required=True, help="walk length")
    p.add_argument("--wp", type=float, help="return parameter (qwalkvec)")
    p.add_argument("--wq", type=float, help="in-out parameter (qwalkvec)")
    p.add_argument("--features", choices=["aggregated", "per-source"],
                   default="aggregated",
                   help="qwalkvec representation: summed over sources (N x t) "
                        "or per-source trajectory rows (N x N*t)")
    p.add_argument("--p", type=float, help="return parameter (node2vec)")
    p.add_argument("--q", type=float, help="in-out parameter (node2vec)")
    p.add_argument("--gamma", type=int, default=80, help="walks per node")
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--dim", type=int, default=128)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--lr", type=float, default=0.025)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="key-value JSON config; flags win")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("evaluate", help="score an embedding by node classification")
    p.add_argument("--embedding", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--tr", default="0.5", help="comma list of train ratios")
    p.add_argument("--repeats", type=int, default=20)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--method-name", default=None, help="method column override")
    p.add_argument("--dataset-name", default=None, help="dataset column override")
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="key-value JSON config; flags win")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gridsearch", help="full parameter-grid evaluation")
    p.add_argument("--edges", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--method", required=True, choices=["qwalkvec", "node2vec"])
    p.add_argument("--grid", default=GRID_DEFAULT, help="comma list of values")
    p.add_argument("--features", choices=["aggregated", "per-source"],
                   default="per-source", help="qwalkvec representation")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--tr", default="0.5", help="single train ratio")
    p.add_argument("--repeats", type=int, default=20)
    p.add_argument("--gamma", type=int, default=80)
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--dim", type=int, default=128)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--dataset-name", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="key-value JSON config; flags win")
    p.set_defaults(func=cmd_gridsearch)

    p = sub.add_parser("spread", help="variance growth: quantum vs classical")
    p.add_argument("--cycle", type=int, required=True, help="odd cycle size")
    p.add_argument("--tmax", type=int, required=True)
    p.add_argument("--walkers", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="key-value JSON config; flags win")
    p.set_defaults(func=cmd_spread)
    return parser


def _read_text(path: str, what: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {what} {path!r}: {exc}") from exc


def _load_graph(path: str) -> graph.Graph:
    try:
        return graph.load_edge_list(_read_text(path, "edge list"))
    except graph.GraphFormatError as exc:
        raise DataError(f"{path}: {exc}") from exc


def _parse_ratios(text: str, parser_error) -> list[float]:
    try:
        ratios = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        parser_error(f"bad --tr list: {text!r}")
    if not ratios or any(not 0.0 < r < 1.0 for r in ratios):
        parser_error(f"train ratios must lie in (0,1): {text!r}")
    return ratios


def _write_manifest(args: argparse.Namespace, outputs: list[str]) -> None:
    payload = {
        "command": args.command,
        "args": {k: v for k, v in vars(args).items()
                 if k not in ("command", "func", "config")},
        "outputs": outputs,
        "version": __version__,
    }
    path = Path(args.out + ".manifest.json")
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def cmd_embed(args, parser) -> None:
    if args.t < 1:
        parser.error("--t must be >= 1")
    g = _load_graph(args.edges)
    if args.method == "qwalkvec":
        if args.wp is None or args.wq is None:
            parser.error("method qwalkvec requires --wp and --wq")
        if args.wp <= 0 or args.wq <= 0:
            parser.error("--wp and --wq must be positive")
        params = WalkParams(args.wp, args.wq, args.t)
        if args.features == "per-source":
            matrix = embed.per_source_features(g, params)
        else:
            matrix = embed.qwalkvec(g, params)
    else:
        if args.method == "node2vec":
            if args.p is None or args.q is None:
                parser.error("method node2vec requires --p and --q")
            if args.p <= 0 or args.q <= 0:
                parser.error("--p and --q must be positive")
            corpus = baselines.biased_walks(
                g, args.gamma, args.t, baselines.BiasParams(args.p, args.q),
                args.seed)
        else:
            corpus = baselines.uniform_walks(g, args.gamma, args.t, args.seed)
        model = baselines.train_skipgram(
            corpus, args.dim, args.window, negatives=args.negatives,
            epochs=args.epochs, lr=args.lr, seed=args.seed,
            node_count=g.node_count)
        matrix = embed.FeatureMatrix(values=model.vectors, kind="baseline",
                                     node_ids=g.original_ids)
    with open(args.out, "w") as sink:
        embed.write_embedding(matrix, sink)
    _write_manifest(args, [args.out])


def _labels_for_embedding(matrix: embed.FeatureMatrix, labels_text: str) -> graph.LabelMap:
    """Align a label file with an embedding's node ids and densify."""
    raw = graph.parse_label_lines(labels_text)
    missing = [v for v in matrix.node_ids if v not in raw]
    if missing:
        raise DataError(f"labels missing for node(s) {missing[:5]}")
    unknown = [v for v in raw if v not in set(matrix.node_ids)]
    if unknown:
        raise DataError(f"labels reference unknown node(s) {unknown[:5]}")
    dense_of: dict[int, int] = {}
    values: list[int] = []
    labels = []
    for v in matrix.node_ids:
        value = raw[v]
        if value not in dense_of:
            dense_of[value] = len(values)
            values.append(value)
        labels.append(dense_of[value])
    if len(values) < 2:
        raise DataError("need at least two distinct labels")
    return graph.LabelMap(labels=tuple(labels), label_count=len(values),
                          original_values=tuple(values))


def cmd_evaluate(args, parser) -> None:
    ratios = _parse_ratios(args.tr, parser.error)
    if args.repeats < 1:
        parser.error("--repeats must be >= 1")
    try:
        matrix = embed.read_embedding(_read_text(args.embedding, "embedding"))
    except ValueError as exc:
        raise DataError(f"{args.embedding}: {exc}") from exc
    try:
        labels = _labels_for_embedding(matrix, _read_text(args.labels, "labels"))
    except graph.GraphFormatError as exc:
        raise DataError(f"{args.labels}: {exc}") from exc

    method = args.method_name or (
        "qwalkvec" if matrix.kind.startswith(("aggregated", "source")) else "baseline")
    dataset = args.dataset_name or Path(args.embedding).stem
    if np.isfinite(matrix.return_param):
        params_label = f"wp={matrix.return_param:g};wq={matrix.inout_param:g}"
    else:
        params_label = "-"

    lines = [evaluation.REPORT_HEADER]
    for ratio in ratios:
        spec = evaluation.SplitSpec(train_ratio=ratio, repeats=args.repeats,
                                    seed=args.seed)
        try:
            report = evaluation.evaluate_protocol(matrix.values, labels, spec)
        except ValueError as exc:
            raise DataError(str(exc)) from exc
        lines.append(evaluation.report_csv_row(method, dataset, report, params_label))
    Path(args.out).write_text("\n".join(lines) + "\n")
    _write_manifest(args, [args.out])


def cmd_gridsearch(args, parser) -> None:
    try:
        grid = tuple(float(x) for x in args.grid.split(",") if x.strip())
    except ValueError:
        parser.error(f"bad --grid list: {args.grid!r}")
    if not grid or any(v <= 0 for v in grid):
        parser.error("grid values must be positive")
    ratio = _parse_ratios(args.tr, parser.error)
    if len(ratio) != 1:
        parser.error("gridsearch takes a single --tr ratio")
    if args.t < 1:
        parser.error("--t must be >= 1")

    g = _load_graph(args.edges)
    try:
        labels = graph.load_labels(_read_text(args.labels, "labels"), g)
    except graph.GraphFormatError as exc:
        raise DataError(f"{args.labels}: {exc}") from exc
    spec = evaluation.SplitSpec(train_ratio=ratio[0], repeats=args.repeats,
                                seed=args.seed)
    best, rows = evaluation.grid_search(
        g, labels, args.method, grid, spec, args.t, embed_seed=args.seed,
        walks_per_node=args.gamma, window=args.window, dim=args.dim,
        features=args.features)

    dataset = args.dataset_name or Path(args.edges).stem
    lines = [evaluation.REPORT_HEADER]
    lines.extend(evaluation.report_csv_row(args.method, dataset, row.report, row.label)
                 for row in rows)
    lines.append(f"# best: {best.label} micro_mean={best.report.micro_mean:.6f}")
    Path(args.out).write_text("\n".join(lines) + "\n")
    print(f"best cell: {best.label} (mean micro F1 {best.report.micro_mean:.4f})")
    _write_manifest(args, [args.out])


def cmd_spread(args, parser) -> None:
    try:
        result = evaluation.spread_variance(args.cycle, args.tmax,
                                            walkers=args.walkers, seed=args.seed)
    except ValueError as exc:
        parser.error(str(exc))
    lines = ["t,sigma2_quantum,sigma2_classical"]
    lines.extend(f"{t},{q:.17g},{c:.17g}" for t, q, c in
                 zip(result.steps, result.sigma2_quantum, result.sigma2_classical))
    lines.append(f"# exponent_quantum={result.exponent_quantum:.6f} "
                 f"exponent_classical={result.exponent_classical:.6f}")
    Path(args.out).write_text("\n".join(lines) + "\n")
    _write_manifest(args, [args.out])


def _merge_config(argv: list[str]) -> list[str]:
    """Expand --config into leading flags so explicit flags override them."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return argv
    try:
        data = json.loads(Path(known.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read config {known.config!r}: {exc}") from exc
    cfg = data.get("args", data)
    command = data.get("command")
    rest = list(argv)
    if rest and rest[0] in COMMANDS:
        command = rest.pop(0)
    if command is None:
        raise DataError("config gives no command and none was supplied")
    expanded: list[str] = [command]
    for key, value in sorted(cfg.items()):
        if value is None:
            continue
        flag = "--" + key.replace("_", "-")
        if flag in rest:
            continue
        expanded.extend([flag, str(value)])
    return expanded + rest


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        argv = _merge_config(argv)
        args = parser.parse_args(argv)
        args.func(args, parser)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
