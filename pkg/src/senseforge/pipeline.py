"""End-to-end orchestration: train, infer, cluster, and score per target word.

Every stage is seeded from one run seed through named hash streams, so a run
is reproducible bit-for-bit regardless of how many worker threads execute it
or in which order the target words finish.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .clustering import ClusterConfig, Clustering, kmeans_cosine
from .corpus import (
    EncodedDocument,
    GoldStandard,
    Instance,
    Target,
    build_vocabulary,
    encode_tokens,
    group_by_target,
    load_instances,
    load_key_file,
    tokenize,
    write_key_file,
)
from .lda import LdaConfig, TopicModel, infer_theta, save_model, train
from .metrics import (
    ContingencyTable,
    ScoreReport,
    contingency,
    pooled_table,
    score_report,
)
from .seeding import derive_seed

REPORT_FORMAT = "senseforge-report"
SWEEP_FORMAT = "senseforge-sweep"
REPORT_VERSION = 1

#: value of ``clusters`` that requests one cluster per gold sense of each word
GOLD_CLUSTERS = "gold"

_SUBSETS = (("all", None), ("verbs", "v"), ("nouns", "n"))


class PipelineError(Exception):
    """A run could not be configured or completed."""


@dataclass(frozen=True)
class RunConfig:
    """Everything a full run needs.

    ``lda.seed`` doubles as the run seed: per-word training, inference, and
    clustering seeds are all derived from it, so two configs that differ only
    in ``workers`` or ``out_dir`` produce identical results.
    """

    test_corpus: str | Path
    clusters: int | str
    lda: LdaConfig
    train_corpus: str | Path | None = None
    corpus_format: str = "jsonl"
    gold_key: str | Path | None = None
    min_count: int = 1
    restarts: int = 10
    cluster_iters: int = 100
    workers: int = 1
    out_dir: str | Path | None = None

    def __post_init__(self) -> None:
        if isinstance(self.clusters, str):
            if self.clusters != GOLD_CLUSTERS:
                raise ValueError(
                    f"clusters must be a positive int or {GOLD_CLUSTERS!r}, "
                    f"got {self.clusters!r}"
                )
            if self.gold_key is None:
                raise ValueError("clusters='gold' requires a gold key file")
        elif self.clusters < 1:
            raise ValueError(f"clusters must be >= 1, got {self.clusters}")
        if self.min_count < 1:
            raise ValueError(f"min_count must be >= 1, got {self.min_count}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.cluster_iters < 1:
            raise ValueError(f"cluster_iters must be >= 1, got {self.cluster_iters}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")


@dataclass(eq=False)
class TargetResult:
    """Artifacts for one target word."""

    target: str
    model: TopicModel
    thetas: dict[str, np.ndarray]
    clustering: Clustering
    n_clusters: int
    n_train_docs: int
    table: ContingencyTable | None = None
    scores: ScoreReport | None = None

    @property
    def system_labels(self) -> dict[str, str]:
        """Cluster indices rendered as sense labels for key-file output."""
        return {
            iid: f"{self.target}.cluster{c}"
            for iid, c in self.clustering.assignment.items()
        }


def run_target_word(
    target: str,
    train_instances: Sequence[Instance],
    test_instances: Sequence[Instance],
    config: RunConfig,
    gold: GoldStandard | None = None,
) -> TargetResult:
    """Run the whole induction chain for one word.

    Any failure is re-raised as :class:`PipelineError` carrying the target
    word, so a multi-word run can report which word broke.
    """
    try:
        return _run_target(target, train_instances, test_instances, config, gold)
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(f"target {target}: {exc}") from exc


def train_target_model(
    target: str,
    instances: Sequence[Instance],
    lda_template: LdaConfig,
    min_count: int = 1,
) -> TopicModel:
    """Build one word's vocabulary and topic model.

    The word's training seed is derived from the template seed and the word
    itself, so per-word results do not depend on which other words are in
    the corpus or in what order they are processed.
    """
    token_lists = [tokenize(inst.text) for inst in instances]
    vocab = build_vocabulary(token_lists, min_count=min_count)
    docs = [
        EncodedDocument(inst.instance_id, encode_tokens(toks, vocab))
        for inst, toks in zip(instances, token_lists)
    ]
    lda_config = replace(
        lda_template, seed=derive_seed("target", lda_template.seed, target)
    )
    return train(docs, vocab, lda_config)


def infer_target_thetas(
    instances: Sequence[Instance], model: TopicModel
) -> dict[str, np.ndarray]:
    """Topic distribution for each instance under a trained model."""
    return {
        inst.instance_id: infer_theta(
            EncodedDocument(
                inst.instance_id, encode_tokens(tokenize(inst.text), model.vocab)
            ),
            model,
        )
        for inst in instances
    }


def cluster_target_thetas(
    target: str,
    thetas: Mapping[str, np.ndarray],
    clusters: int | str,
    run_seed: int,
    gold: GoldStandard | None = None,
    restarts: int = 10,
    max_iters: int = 100,
) -> tuple[Clustering, int]:
    """Cluster one word's theta vectors; returns the clustering and the
    resolved cluster count."""
    n_clusters = resolve_clusters(target, clusters, gold, n_points=len(thetas))
    cluster_config = ClusterConfig(
        n_clusters=n_clusters,
        max_iters=max_iters,
        seed=derive_seed("cluster", run_seed, target),
        restarts=restarts,
    )
    return kmeans_cosine(sorted(thetas.items()), cluster_config), n_clusters


def _run_target(
    target: str,
    train_instances: Sequence[Instance],
    test_instances: Sequence[Instance],
    config: RunConfig,
    gold: GoldStandard | None,
) -> TargetResult:
    if not test_instances:
        raise ValueError("no test instances")
    if not train_instances:
        raise ValueError("no training instances")

    model = train_target_model(
        target, train_instances, config.lda, min_count=config.min_count
    )
    thetas = infer_target_thetas(test_instances, model)
    clustering, n_clusters = cluster_target_thetas(
        target,
        thetas,
        config.clusters,
        run_seed=config.lda.seed,
        gold=gold,
        restarts=config.restarts,
        max_iters=config.cluster_iters,
    )

    result = TargetResult(
        target=target,
        model=model,
        thetas=thetas,
        clustering=clustering,
        n_clusters=n_clusters,
        n_train_docs=len(train_instances),
    )
    if gold is not None and target in gold.targets():
        result.table = contingency(gold.labels_for(target), clustering.assignment)
        result.scores = score_report(result.table)
    return result


def resolve_clusters(
    target: str, clusters: int | str, gold: GoldStandard | None, n_points: int
) -> int:
    """Turn the cluster-count policy into a concrete count for one word."""
    if clusters == GOLD_CLUSTERS:
        if gold is None or target not in gold.targets():
            raise ValueError("clusters='gold' but the gold key has no entry for this word")
        wanted = gold.n_classes(target)
    else:
        wanted = int(clusters)
    # never ask for more clusters than there are instances to fill them
    return max(1, min(wanted, n_points))


@dataclass(eq=False)
class RunReport:
    """Results of a full run, ready for serialization."""

    config: RunConfig
    results: dict[str, TargetResult]
    failures: list[dict[str, str]]
    aggregates: dict[str, dict | None]
    timing: dict[str, object]

    def to_json_dict(self, include_timing: bool = True) -> dict:
        targets = {}
        for key in sorted(self.results):
            res = self.results[key]
            entry: dict[str, object] = {
                "n_train_docs": res.n_train_docs,
                "n_test_docs": len(res.thetas),
                "n_clusters": res.n_clusters,
            }
            if res.scores is not None and res.table is not None:
                entry["n_scored"] = res.table.n
                entry["n_excluded"] = res.table.n_excluded
                entry["scores"] = res.scores.as_dict()
                entry["scores_percent"] = res.scores.percent()
                entry["contingency"] = res.table.to_json_dict()
            targets[key] = entry
        out: dict[str, object] = {
            "format": REPORT_FORMAT,
            "version": REPORT_VERSION,
            "config": _config_echo(self.config),
            "targets": targets,
            "aggregates": self.aggregates,
            "failures": sorted(self.failures, key=lambda f: f["target"]),
        }
        if include_timing:
            out["timing"] = self.timing
        return out

    def tsv(self) -> str:
        """Summary table: instance-weighted scores x100, one column per subset."""
        return aggregate_tsv(self.aggregates)

    def write(self, out_dir: str | Path) -> None:
        """Write report.json, report.tsv, system.key, thetas.jsonl,
        contingency.txt, and one model file per word."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _dump_json(out / "report.json", self.to_json_dict())
        (out / "report.tsv").write_text(self.tsv(), encoding="utf-8")

        labels = {
            key: res.system_labels for key, res in sorted(self.results.items())
        }
        write_key_file(GoldStandard(labels), out / "system.key")

        write_thetas(
            out / "thetas.jsonl",
            {key: res.thetas for key, res in self.results.items()},
        )

        blocks = []
        for key in sorted(self.results):
            res = self.results[key]
            if res.table is not None:
                blocks.append(format_contingency(key, res.table))
        (out / "contingency.txt").write_text(
            "\n\n".join(blocks) + ("\n" if blocks else ""), encoding="utf-8"
        )

        models = out / "models"
        models.mkdir(exist_ok=True)
        for key in sorted(self.results):
            save_model(self.results[key].model, models / f"{key}.model.npz")


def run_all(config: RunConfig) -> RunReport:
    """Run every target word in the test corpus; per-word failures are
    recorded in the report rather than aborting the whole run."""
    t_start = time.perf_counter()

    test_groups = group_by_target(
        load_instances(config.test_corpus, config.corpus_format)
    )
    if not test_groups:
        raise PipelineError(f"no instances in test corpus {config.test_corpus}")
    if config.train_corpus is not None:
        train_groups = group_by_target(
            load_instances(config.train_corpus, config.corpus_format)
        )
        if set(train_groups) != set(test_groups):
            only_train = sorted(set(train_groups) - set(test_groups))
            only_test = sorted(set(test_groups) - set(train_groups))
            raise PipelineError(
                "train and test corpora must cover the same target words "
                f"(train-only: {only_train}, test-only: {only_test})"
            )
    else:
        train_groups = test_groups

    gold = load_key_file(config.gold_key) if config.gold_key is not None else None

    targets = sorted(test_groups)
    results: dict[str, TargetResult] = {}
    failures: list[dict[str, str]] = []
    per_target_seconds: dict[str, float] = {}

    def work(key: str) -> tuple[TargetResult, float]:
        t0 = time.perf_counter()
        res = run_target_word(key, train_groups[key], test_groups[key], config, gold)
        return res, time.perf_counter() - t0

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        futures = {key: pool.submit(work, key) for key in targets}
        for key in targets:
            try:
                res, seconds = futures[key].result()
            except Exception as exc:
                failures.append({"target": key, "error": str(exc)})
            else:
                results[key] = res
                per_target_seconds[key] = round(seconds, 3)

    aggregates = aggregate_scores(
        {key: res.table for key, res in results.items() if res.table is not None}
    )
    timing = {
        "total_seconds": round(time.perf_counter() - t_start, 3),
        "per_target_seconds": per_target_seconds,
        "workers": config.workers,
        "out_dir": None if config.out_dir is None else str(config.out_dir),
    }
    report = RunReport(
        config=config,
        results=results,
        failures=failures,
        aggregates=aggregates,
        timing=timing,
    )
    if config.out_dir is not None:
        report.write(config.out_dir)
    return report


def aggregate_scores(
    tables: Mapping[str, ContingencyTable]
) -> dict[str, dict | None]:
    """Aggregate per-word tables over all words, verbs only, and nouns only.

    Two averages per subset: ``instance_weighted`` scores the pooled
    block-diagonal table (each word counts by its instances), ``uniform``
    is the plain mean of per-word scores (each word counts once).
    """
    out: dict[str, dict | None] = {}
    for name, pos in _SUBSETS:
        chosen = {
            key: table
            for key, table in tables.items()
            if pos is None or Target.parse(key).pos == pos
        }
        if not chosen:
            out[name] = None
            continue
        weighted = score_report(pooled_table(chosen))
        per_word = [score_report(t).as_dict() for t in chosen.values()]
        uniform = {
            metric: sum(s[metric] for s in per_word) / len(per_word)
            for metric in per_word[0]
        }
        out[name] = {
            "n_targets": len(chosen),
            "n_instances": sum(t.n for t in chosen.values()),
            "instance_weighted": weighted.as_dict(),
            "instance_weighted_percent": weighted.percent(),
            "uniform": uniform,
        }
    return out


@dataclass(eq=False)
class SweepResult:
    """Scores of identical runs at several topic counts."""

    rows: list[dict[str, object]]

    def to_json_dict(self) -> dict:
        return {
            "format": SWEEP_FORMAT,
            "version": REPORT_VERSION,
            "rows": self.rows,
        }

    def tsv(self) -> str:
        """One column per K, instance-weighted scores over all words, x100."""
        ks = [row["k"] for row in self.rows]
        lines = ["k\t" + "\t".join(str(k) for k in ks)]
        for metric in ("v_measure", "f_score"):
            cells = []
            for row in self.rows:
                value = row[metric]
                cells.append("-" if value is None else f"{100.0 * value:.1f}")
            lines.append(metric + "\t" + "\t".join(cells))
        return "\n".join(lines) + "\n"

    def best_k(self, metric: str = "v_measure") -> int:
        scored = [row for row in self.rows if row[metric] is not None]
        if not scored:
            raise ValueError("no scored rows in sweep")
        return max(scored, key=lambda row: row[metric])["k"]


def sweep_k(config: RunConfig, k_values: Sequence[int]) -> SweepResult:
    """Re-run the full pipeline at each topic count and collect the scores.

    ``alpha`` left unset in ``config.lda`` re-resolves to ``50 / K`` at each
    grid point.  Output files are suppressed for the individual runs; the
    sweep itself is the artifact.
    """
    ks = list(k_values)
    if len(ks) < 2 or len(set(ks)) != len(ks):
        raise ValueError(f"need at least 2 distinct K values, got {ks}")
    if config.gold_key is None:
        raise PipelineError("a K sweep needs a gold key to compare scores")
    rows: list[dict[str, object]] = []
    for k in ks:
        cfg = replace(config, lda=replace(config.lda, n_topics=k), out_dir=None)
        report = run_all(cfg)
        overall = report.aggregates.get("all")
        row: dict[str, object] = {"k": k, "n_failures": len(report.failures)}
        if overall is None:
            row["v_measure"] = None
            row["f_score"] = None
        else:
            scores = overall["instance_weighted"]
            row["v_measure"] = scores["v_measure"]
            row["f_score"] = scores["f_score"]
        rows.append(row)
    return SweepResult(rows)


def score_key_files(system: GoldStandard, gold: GoldStandard) -> dict:
    """Score a system key file against a gold key file.

    Returns a report dict with per-target tables and scores plus the same
    aggregates as a full run.  Targets present in only one of the files are
    skipped and listed under ``skipped``.
    """
    shared = sorted(set(system.targets()) & set(gold.targets()))
    if not shared:
        raise PipelineError("system and gold key files share no target words")
    targets: dict[str, dict] = {}
    tables: dict[str, ContingencyTable] = {}
    for key in shared:
        table = contingency(gold.labels_for(key), system.labels_for(key))
        scores = score_report(table)
        tables[key] = table
        targets[key] = {
            "n_scored": table.n,
            "n_excluded": table.n_excluded,
            "scores": scores.as_dict(),
            "scores_percent": scores.percent(),
            "contingency": table.to_json_dict(),
        }
    skipped = sorted(
        set(system.targets()).symmetric_difference(gold.targets())
    )
    return {
        "format": REPORT_FORMAT,
        "version": REPORT_VERSION,
        "targets": targets,
        "aggregates": aggregate_scores(tables),
        "skipped": skipped,
    }


def format_contingency(target: str, table: ContingencyTable) -> str:
    """Human-readable view of one word's table: per cluster, the gold-class
    breakdown, largest class first."""
    lines = [
        f"target {target}: {table.n} instances, "
        f"{len(table.class_labels)} classes, {len(table.cluster_labels)} clusters"
        + (f", {table.n_excluded} excluded" if table.n_excluded else "")
    ]
    for j, cluster in enumerate(table.cluster_labels):
        size = int(table.cluster_sizes()[j])
        cells = [
            (int(table.a[i, j]), str(label))
            for i, label in enumerate(table.class_labels)
            if table.a[i, j] > 0
        ]
        cells.sort(key=lambda c: (-c[0], c[1]))
        breakdown = ", ".join(f"{label}={count}" for count, label in cells)
        lines.append(f"  cluster {cluster} ({size} instances): {breakdown}")
    return "\n".join(lines)


def emit_contingency_report(
    target: str, clustering: Clustering, gold_labels: Mapping[str, str]
) -> tuple[str, dict]:
    """Cross one word's clustering with its gold labels.

    Returns the human-readable text and a JSON-safe dict that round-trips
    through :meth:`ContingencyTable.from_json_dict` without loss.
    """
    table = contingency(gold_labels, clustering.assignment)
    payload = {"target": target, "table": table.to_json_dict()}
    return format_contingency(target, table), payload


def _config_echo(config: RunConfig) -> dict:
    """Config as recorded in reports.

    Execution details (workers, out_dir) are deliberately left out: they may
    differ between runs that must otherwise produce identical reports.
    """
    return {
        "test_corpus": str(config.test_corpus),
        "train_corpus": None
        if config.train_corpus is None
        else str(config.train_corpus),
        "corpus_format": config.corpus_format,
        "gold_key": None if config.gold_key is None else str(config.gold_key),
        "clusters": config.clusters,
        "min_count": config.min_count,
        "restarts": config.restarts,
        "cluster_iters": config.cluster_iters,
        "lda": {
            "n_topics": config.lda.n_topics,
            "alpha": config.lda.effective_alpha,
            "beta": config.lda.beta,
            "train_iters": config.lda.train_iters,
            "infer_iters": config.lda.infer_iters,
            "infer_burn_in": config.lda.infer_burn_in,
            "seed": config.lda.seed,
        },
    }


def write_thetas(
    path: str | Path, by_target: Mapping[str, Mapping[str, np.ndarray]]
) -> None:
    """Write theta vectors as JSON lines of {"target", "id", "theta"},
    sorted by target then instance id."""
    with open(path, "w", encoding="utf-8") as fh:
        for target in sorted(by_target):
            thetas = by_target[target]
            for iid in sorted(thetas):
                rec = {"target": target, "id": iid, "theta": thetas[iid].tolist()}
                fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_thetas(path: str | Path) -> dict[str, dict[str, np.ndarray]]:
    """Read a theta file back into per-target {instance id: vector} maps."""
    by_target: dict[str, dict[str, np.ndarray]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise PipelineError(f"{path}:{line_no}: invalid JSON: {exc}") from exc
            if not isinstance(rec, dict) or set(rec) != {"target", "id", "theta"}:
                raise PipelineError(
                    f"{path}:{line_no}: expected an object with keys "
                    "target, id, theta"
                )
            theta = np.asarray(rec["theta"], dtype=np.float64)
            if theta.ndim != 1 or theta.size == 0:
                raise PipelineError(
                    f"{path}:{line_no}: theta must be a non-empty flat list"
                )
            per_word = by_target.setdefault(rec["target"], {})
            if rec["id"] in per_word:
                raise PipelineError(
                    f"{path}:{line_no}: duplicate theta for "
                    f"{rec['target']} instance {rec['id']}"
                )
            per_word[rec["id"]] = theta
    if not by_target:
        raise PipelineError(f"no theta records in {path}")
    return by_target


def aggregate_tsv(aggregates: Mapping[str, dict | None]) -> str:
    """Render aggregate scores as the summary TSV used in reports."""
    names = [name for name, _ in _SUBSETS]
    lines = ["metric\t" + "\t".join(names)]
    for metric in ("v_measure", "f_score"):
        cells = []
        for name in names:
            agg = aggregates.get(name)
            if agg is None:
                cells.append("-")
            else:
                cells.append(f"{100.0 * agg['instance_weighted'][metric]:.1f}")
        lines.append(metric + "\t" + "\t".join(cells))
    return "\n".join(lines) + "\n"


def _dump_json(path: Path, obj: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")
