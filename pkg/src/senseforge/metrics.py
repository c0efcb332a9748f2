"""Clustering evaluation against a gold standard.

All scores are computed from one sufficient statistic: the class-by-cluster
contingency table ``a``, where ``a[i, j]`` counts the instances of gold
class ``i`` that landed in cluster ``j``.

* homogeneity: ``1 - H(class | cluster) / H(class)`` -- high when each
  cluster holds a single class.
* completeness: ``1 - H(cluster | class) / H(cluster)`` -- high when each
  class lands in a single cluster.  This is exactly homogeneity of the
  transposed table and is computed that way.
* V-measure: harmonic mean of the two.
* paired precision / recall / F-score: computed over unordered instance
  pairs that share a cluster and/or a class.

Entropies use base 2 by default; every score is a ratio of entropies, so
the base cancels out (the ``base`` argument exists so that this invariance
can be tested, not because it changes anything).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Mapping

import numpy as np


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """Class-by-cluster co-occurrence counts.

    ``n_excluded`` records instances that had a gold label or a cluster
    assignment but not both; they take no part in any score.
    """

    a: np.ndarray  # int64, shape (n_classes, n_clusters)
    class_labels: tuple[Hashable, ...]
    cluster_labels: tuple[Hashable, ...]
    n_excluded: int = 0

    def __post_init__(self) -> None:
        a = np.asarray(self.a, dtype=np.int64)
        if a.ndim != 2:
            raise ValueError("contingency table must be 2-dimensional")
        if a.shape != (len(self.class_labels), len(self.cluster_labels)):
            raise ValueError("table shape does not match its labels")
        if (a < 0).any():
            raise ValueError("contingency counts must be non-negative")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "class_labels", tuple(self.class_labels))
        object.__setattr__(self, "cluster_labels", tuple(self.cluster_labels))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ContingencyTable)
            and self.class_labels == other.class_labels
            and self.cluster_labels == other.cluster_labels
            and self.n_excluded == other.n_excluded
            and np.array_equal(self.a, other.a)
        )

    @property
    def n(self) -> int:
        return int(self.a.sum())

    def class_sizes(self) -> np.ndarray:
        return self.a.sum(axis=1)

    def cluster_sizes(self) -> np.ndarray:
        return self.a.sum(axis=0)

    def transposed(self) -> "ContingencyTable":
        """Swap the roles of classes and clusters."""
        return ContingencyTable(
            self.a.T, self.cluster_labels, self.class_labels, self.n_excluded
        )

    def to_json_dict(self) -> dict:
        return {
            "classes": list(self.class_labels),
            "clusters": list(self.cluster_labels),
            "counts": self.a.tolist(),
            "n_excluded": self.n_excluded,
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "ContingencyTable":
        return cls(
            np.asarray(data["counts"], dtype=np.int64),
            tuple(data["classes"]),
            tuple(data["clusters"]),
            int(data.get("n_excluded", 0)),
        )


def contingency(
    gold_labels: Mapping[str, Hashable], assignment: Mapping[str, Hashable]
) -> ContingencyTable:
    """Cross-tabulate gold labels against cluster assignments.

    Only instances present in both maps contribute; the rest are counted in
    ``n_excluded``.  Raises :class:`ValueError` when the overlap is empty.
    """
    shared = sorted(set(gold_labels) & set(assignment))
    if not shared:
        raise ValueError("no instances have both a gold label and a cluster assignment")
    n_excluded = len(gold_labels) + len(assignment) - 2 * len(shared)
    class_labels = tuple(sorted({gold_labels[i] for i in shared}))
    cluster_labels = tuple(sorted({assignment[i] for i in shared}))
    class_index = {label: i for i, label in enumerate(class_labels)}
    cluster_index = {label: j for j, label in enumerate(cluster_labels)}
    a = np.zeros((len(class_labels), len(cluster_labels)), dtype=np.int64)
    for instance_id in shared:
        a[class_index[gold_labels[instance_id]], cluster_index[assignment[instance_id]]] += 1
    return ContingencyTable(a, class_labels, cluster_labels, n_excluded)


def pooled_table(tables: Mapping[str, ContingencyTable]) -> ContingencyTable:
    """Pool per-word tables into one by block-diagonal concatenation.

    Classes and clusters of different words are distinct entities, so labels
    are qualified with the word key; scoring the pooled table weights every
    word by its instance count.
    """
    if not tables:
        raise ValueError("no tables to pool")
    class_labels: list[str] = []
    cluster_labels: list[str] = []
    for key in sorted(tables):
        t = tables[key]
        class_labels.extend(f"{key}::{c}" for c in t.class_labels)
        cluster_labels.extend(f"{key}::{c}" for c in t.cluster_labels)
    a = np.zeros((len(class_labels), len(cluster_labels)), dtype=np.int64)
    row = col = 0
    for key in sorted(tables):
        t = tables[key]
        a[row : row + t.a.shape[0], col : col + t.a.shape[1]] = t.a
        row += t.a.shape[0]
        col += t.a.shape[1]
    n_excluded = sum(t.n_excluded for t in tables.values())
    return ContingencyTable(a, tuple(class_labels), tuple(cluster_labels), n_excluded)


def _marginal_entropy(sizes: np.ndarray, n: int, base: float) -> float:
    """Entropy of a marginal distribution given by integer sizes; 0*log 0 = 0."""
    p = sizes[sizes > 0] / n
    return float(-(p * (np.log(p) / math.log(base))).sum())


def _conditional_entropy(a: np.ndarray, n: int, base: float) -> float:
    """H(row variable | column variable), zero cells contributing nothing."""
    col_sizes = a.sum(axis=0)
    total = 0.0
    for j in range(a.shape[1]):
        col = a[:, j]
        nz = col[col > 0]
        if nz.size == 0:
            continue
        total += float(-((nz / n) * (np.log(nz / col_sizes[j]) / math.log(base))).sum())
    return total


def homogeneity(t: ContingencyTable, base: float = 2.0) -> float:
    """1 - H(class | cluster) / H(class); 1.0 by convention for a single class."""
    n = t.n
    if n == 0:
        raise ValueError("contingency table is empty")
    h_class = _marginal_entropy(t.class_sizes(), n, base)
    if h_class == 0.0:
        return 1.0
    value = 1.0 - _conditional_entropy(t.a, n, base) / h_class
    return min(1.0, max(0.0, value))


def completeness(t: ContingencyTable, base: float = 2.0) -> float:
    """1 - H(cluster | class) / H(cluster); 1.0 by convention for a single cluster.

    The defining formulas are those of homogeneity with classes and clusters
    swapped, so this delegates to ``homogeneity`` on the transposed table;
    the duality holds bit-for-bit.
    """
    return homogeneity(t.transposed(), base)


def _harmonic(x: float, y: float) -> float:
    if x == 0.0 or y == 0.0:
        return 0.0
    return 2.0 * x * y / (x + y)


def v_measure(t: ContingencyTable, base: float = 2.0) -> float:
    """Harmonic mean of homogeneity and completeness; 0 when either is 0."""
    return _harmonic(homogeneity(t, base), completeness(t, base))


def paired_f_score(t: ContingencyTable) -> tuple[float, float, float]:
    """Precision, recall and F-score over unordered instance pairs.

    A pair is "common" when both instances share a cluster and a class.
    Precision divides by pairs sharing a cluster, recall by pairs sharing a
    class; either count being zero makes the corresponding score 0, and the
    F-score is 0 whenever precision or recall is.  Pair counts are exact
    integer arithmetic.
    """
    if t.n < 2:
        raise ValueError("paired scores need at least 2 instances")

    def pairs(counts: np.ndarray) -> int:
        c = counts.astype(object)  # Python ints: no overflow on large tables
        return int((c * (c - 1) // 2).sum())

    common = pairs(t.a.ravel())
    in_clusters = pairs(t.cluster_sizes())
    in_classes = pairs(t.class_sizes())
    precision = common / in_clusters if in_clusters else 0.0
    recall = common / in_classes if in_classes else 0.0
    return precision, recall, _harmonic(precision, recall)


@dataclass(frozen=True)
class ScoreReport:
    """All scores for one clustering-vs-gold comparison, each in [0, 1]."""

    homogeneity: float
    completeness: float
    v_measure: float
    paired_precision: float
    paired_recall: float
    f_score: float

    def as_dict(self) -> dict[str, float]:
        return {
            "homogeneity": self.homogeneity,
            "completeness": self.completeness,
            "v_measure": self.v_measure,
            "paired_precision": self.paired_precision,
            "paired_recall": self.paired_recall,
            "f_score": self.f_score,
        }

    def percent(self) -> dict[str, float]:
        """The same scores scaled to 0..100 for reporting."""
        return {name: 100.0 * value for name, value in self.as_dict().items()}


def score_report(t: ContingencyTable) -> ScoreReport:
    """Compute every score for one contingency table."""
    h = homogeneity(t)
    c = completeness(t)
    precision, recall, f = paired_f_score(t)
    return ScoreReport(h, c, _harmonic(h, c), precision, recall, f)
