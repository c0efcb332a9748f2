"""Command-line interface.

Subcommands mirror the pipeline stages so they can run separately or as one
``run``: ``train`` writes one model per target word, ``infer`` turns a corpus
into theta vectors under saved models, ``cluster`` groups theta vectors into
a system key file, ``score`` compares key files, and ``sweep-k`` repeats
``run`` over a grid of topic counts.

Seeds resolve as: explicit ``--seed`` flag, else the ``SENSEFORGE_SEED``
environment variable, else 1.  Exit status: 0 on success, 1 when some target
words failed but the run carried on, 2 on configuration or input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from .corpus import (
    CorpusError,
    GoldStandard,
    group_by_target,
    load_instances,
    load_key_file,
    write_key_file,
)
from .lda import LdaConfig, load_model, save_model
from .pipeline import (
    GOLD_CLUSTERS,
    PipelineError,
    RunConfig,
    aggregate_tsv,
    cluster_target_thetas,
    infer_target_thetas,
    read_thetas,
    run_all,
    score_key_files,
    sweep_k,
    train_target_model,
    write_thetas,
)

SEED_ENV_VAR = "SENSEFORGE_SEED"
DEFAULT_SEED = 1
MODEL_SUFFIX = ".model.npz"


def resolve_seed(flag_value: int | None) -> int:
    """Flag beats environment beats the default of 1."""
    if flag_value is not None:
        return flag_value
    env = os.environ.get(SEED_ENV_VAR)
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from None


def _clusters_arg(value: str) -> int | str:
    if value == GOLD_CLUSTERS:
        return value
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected an integer or '{GOLD_CLUSTERS}', got {value!r}"
        ) from None


def _k_values_arg(value: str) -> list[int]:
    try:
        ks = [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {value!r}"
        ) from None
    if not ks:
        raise argparse.ArgumentTypeError("no K values given")
    return ks


def _add_corpus_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", required=True, help="test corpus (JSONL or directory)")
    p.add_argument(
        "--format",
        choices=("jsonl", "dir"),
        default="jsonl",
        dest="corpus_format",
        help="corpus layout (default: jsonl)",
    )


def _add_lda_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=400, help="number of topics (default: 400)")
    p.add_argument(
        "--alpha",
        type=float,
        default=None,
        help="document-topic prior (default: 50/K)",
    )
    p.add_argument(
        "--beta", type=float, default=0.01, help="topic-word prior (default: 0.01)"
    )
    p.add_argument(
        "--iters", type=int, default=1000, help="training sweeps (default: 1000)"
    )
    p.add_argument(
        "--min-count",
        type=int,
        default=1,
        help="drop words seen fewer times than this per word's training set",
    )


def _add_infer_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--infer-iters",
        type=int,
        default=100,
        help="inference sweeps per instance (default: 100)",
    )
    p.add_argument(
        "--burn-in",
        type=int,
        default=50,
        help="inference sweeps discarded before averaging (default: 50)",
    )


def _add_cluster_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--clusters",
        type=_clusters_arg,
        required=True,
        help=f"clusters per word: an integer, or '{GOLD_CLUSTERS}' "
        "for each word's gold class count",
    )
    p.add_argument(
        "--restarts",
        type=int,
        default=10,
        help="k-means restarts, best objective kept (default: 10)",
    )
    p.add_argument(
        "--cluster-iters",
        type=int,
        default=100,
        help="k-means iteration cap per restart (default: 100)",
    )


def _add_seed_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--seed",
        type=int,
        default=None,
        help=f"run seed (default: ${SEED_ENV_VAR} or {DEFAULT_SEED})",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="senseforge",
        description="Induce and evaluate word senses by clustering topic "
        "distributions of target-word contexts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one topic model per target word")
    _add_corpus_args(p)
    _add_lda_args(p)
    _add_seed_arg(p)
    p.add_argument("--out", required=True, help="directory for model files")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("infer", help="infer theta vectors under saved models")
    p.add_argument("--models", required=True, help="directory of model files")
    _add_corpus_args(p)
    p.add_argument("--out", required=True, help="output theta file (JSONL)")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("cluster", help="cluster theta vectors into senses")
    p.add_argument("--thetas", required=True, help="theta file from `infer`")
    _add_cluster_args(p)
    p.add_argument(
        "--gold",
        default=None,
        help=f"gold key file (required with --clusters {GOLD_CLUSTERS})",
    )
    _add_seed_arg(p)
    p.add_argument("--out", required=True, help="output system key file")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("score", help="score a system key file against gold")
    p.add_argument("--system", required=True, help="system key file")
    p.add_argument("--gold", required=True, help="gold key file")
    p.add_argument("--out", required=True, help="output report (JSON; TSV beside it)")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("run", help="train, infer, cluster, and score end to end")
    _add_corpus_args(p)
    p.add_argument(
        "--train-corpus",
        default=None,
        help="separate training corpus (default: train on the test instances)",
    )
    p.add_argument("--gold", default=None, help="gold key file for scoring")
    _add_lda_args(p)
    _add_infer_args(p)
    _add_cluster_args(p)
    _add_seed_arg(p)
    p.add_argument("--workers", type=int, default=1, help="parallel target words")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep-k", help="repeat `run` over a grid of topic counts")
    _add_corpus_args(p)
    p.add_argument("--train-corpus", default=None)
    p.add_argument("--gold", required=True, help="gold key file (scores the sweep)")
    p.add_argument(
        "--k-values",
        type=_k_values_arg,
        required=True,
        help="comma-separated topic counts, e.g. 10,50,200,400,500",
    )
    _add_lda_args(p)
    _add_infer_args(p)
    _add_cluster_args(p)
    _add_seed_arg(p)
    p.add_argument("--workers", type=int, default=1, help="parallel target words")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_sweep)

    return parser


def _lda_config(args: argparse.Namespace, seed: int) -> LdaConfig:
    return LdaConfig(
        n_topics=args.k,
        alpha=args.alpha,
        beta=args.beta,
        train_iters=args.iters,
        infer_iters=getattr(args, "infer_iters", 100),
        infer_burn_in=getattr(args, "burn_in", 50),
        seed=seed,
    )


def cmd_train(args: argparse.Namespace) -> int:
    seed = resolve_seed(args.seed)
    template = _lda_config(args, seed)
    groups = group_by_target(load_instances(args.corpus, args.corpus_format))
    if not groups:
        raise PipelineError(f"no instances in corpus {args.corpus}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    failed = 0
    for target in sorted(groups):
        try:
            model = train_target_model(
                target, groups[target], template, min_count=args.min_count
            )
        except Exception as exc:
            failed += 1
            print(f"error: target {target}: {exc}", file=sys.stderr)
            continue
        save_model(model, out / f"{target}{MODEL_SUFFIX}")
        print(
            f"trained {target}: {len(groups[target])} instances, "
            f"{len(model.vocab)} words, K={model.config.n_topics}"
        )
    return 1 if failed else 0


def cmd_infer(args: argparse.Namespace) -> int:
    groups = group_by_target(load_instances(args.corpus, args.corpus_format))
    if not groups:
        raise PipelineError(f"no instances in corpus {args.corpus}")
    models_dir = Path(args.models)
    thetas = {}
    for target in sorted(groups):
        model_path = models_dir / f"{target}{MODEL_SUFFIX}"
        if not model_path.exists():
            raise PipelineError(f"no model for target {target} at {model_path}")
        model = load_model(model_path)
        thetas[target] = infer_target_thetas(groups[target], model)
        print(f"inferred {target}: {len(thetas[target])} theta vectors")
    write_thetas(args.out, thetas)
    return 0


def cmd_cluster(args: argparse.Namespace) -> int:
    seed = resolve_seed(args.seed)
    gold = load_key_file(args.gold) if args.gold is not None else None
    if args.clusters == GOLD_CLUSTERS and gold is None:
        raise PipelineError(f"--clusters {GOLD_CLUSTERS} requires --gold")
    by_target = read_thetas(args.thetas)
    labels: dict[str, dict[str, str]] = {}
    for target in sorted(by_target):
        clustering, _ = cluster_target_thetas(
            target,
            by_target[target],
            args.clusters,
            run_seed=seed,
            gold=gold,
            restarts=args.restarts,
            max_iters=args.cluster_iters,
        )
        labels[target] = {
            iid: f"{target}.cluster{c}" for iid, c in clustering.assignment.items()
        }
        n_used = len(set(clustering.assignment.values()))
        print(f"clustered {target}: {len(labels[target])} instances, {n_used} clusters")
    write_key_file(GoldStandard(labels), args.out)
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    report = score_key_files(load_key_file(args.system), load_key_file(args.gold))
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, sort_keys=True, indent=2)
        fh.write("\n")
    tsv = aggregate_tsv(report["aggregates"])
    out.with_suffix(".tsv").write_text(tsv, encoding="utf-8")
    print(tsv, end="")
    return 0


def _run_config(args: argparse.Namespace, seed: int) -> RunConfig:
    return RunConfig(
        test_corpus=args.corpus,
        clusters=args.clusters,
        lda=_lda_config(args, seed),
        train_corpus=args.train_corpus,
        corpus_format=args.corpus_format,
        gold_key=args.gold,
        min_count=args.min_count,
        restarts=args.restarts,
        cluster_iters=args.cluster_iters,
        workers=args.workers,
        out_dir=args.out,
    )


def cmd_run(args: argparse.Namespace) -> int:
    config = _run_config(args, resolve_seed(args.seed))
    report = run_all(config)
    for failure in report.failures:
        print(f"error: target {failure['target']}: {failure['error']}", file=sys.stderr)
    print(f"{len(report.results)} target words -> {config.out_dir}")
    if any(agg is not None for agg in report.aggregates.values()):
        print(report.tsv(), end="")
    return 1 if report.failures else 0


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _run_config(args, resolve_seed(args.seed))
    config = replace(config, out_dir=None)
    result = sweep_k(config, args.k_values)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sweep.json", "w", encoding="utf-8") as fh:
        json.dump(result.to_json_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")
    (out / "sweep.tsv").write_text(result.tsv(), encoding="utf-8")
    print(result.tsv(), end="")
    return 1 if any(row["n_failures"] for row in result.rows) else 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PipelineError, CorpusError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
