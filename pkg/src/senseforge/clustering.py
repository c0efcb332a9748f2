"""Spherical k-means over topic distributions.

Points live on the topic simplex and are compared by cosine similarity, so
only directions matter: inputs are normalized to unit length and centroids
are renormalized mean directions.  That choice makes the objective -- the
sum of ``1 - cos(point, centroid)`` over all points -- provably
non-increasing across iterations.

Determinism does not depend on input order: the random stream is keyed by
the seed together with the sorted instance ids, and points are processed in
sorted-id order internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .seeding import derive_seed

_EPS = 1e-12


@dataclass(frozen=True)
class ClusterConfig:
    n_clusters: int
    max_iters: int = 100
    seed: int = 0
    restarts: int = 10

    def __post_init__(self) -> None:
        if self.n_clusters < 1:
            raise ValueError(f"n_clusters must be >= 1, got {self.n_clusters}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")


@dataclass(frozen=True, eq=False)
class Clustering:
    """Result of one k-means run.

    ``traces`` holds the objective after every assignment pass, one trace
    per restart; ``objective`` is the terminal objective of the winning
    restart (the one returned here).
    """

    assignment: dict[str, int]
    centroids: np.ndarray  # (n_clusters, dim), unit rows
    objective: float
    traces: tuple[tuple[float, ...], ...]


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two vectors, in [-1, 1].

    Symmetric and invariant to positive rescaling of either argument.
    Zero-norm inputs have no direction and raise :class:`ValueError`.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na <= _EPS or nb <= _EPS:
        raise ValueError("cosine similarity is undefined for zero-norm vectors")
    return float(np.dot(a, b) / (na * nb))


def kmeans_cosine(
    points: Sequence[tuple[str, np.ndarray]], config: ClusterConfig
) -> Clustering:
    """Cluster ``(instance_id, vector)`` points by cosine k-means.

    Runs ``config.restarts`` independent k-means++ style initializations and
    keeps the restart with the lowest objective.  Every point ends up
    assigned to the centroid with maximal cosine similarity (ties go to the
    lowest cluster index).
    """
    if not points:
        raise ValueError("no points to cluster")
    ids = [instance_id for instance_id, _ in points]
    if len(set(ids)) != len(ids):
        raise ValueError("instance ids must be unique")
    if config.n_clusters > len(points):
        raise ValueError(
            f"cannot form {config.n_clusters} clusters from {len(points)} points"
        )

    order = np.argsort(ids)
    sorted_ids = [ids[i] for i in order]
    x = np.asarray([np.asarray(points[i][1], dtype=np.float64) for i in order])
    norms = np.linalg.norm(x, axis=1)
    if (norms <= _EPS).any():
        bad = sorted_ids[int(np.argmax(norms <= _EPS))]
        raise ValueError(f"zero-norm point {bad!r} cannot be clustered by cosine")
    x_unit = x / norms[:, None]

    rng = np.random.default_rng(derive_seed("kmeans", config.seed, *sorted_ids))
    best: tuple[np.ndarray, np.ndarray, list[float]] | None = None
    traces: list[tuple[float, ...]] = []
    for _ in range(config.restarts):
        labels, centroids, trace = _single_run(x_unit, config.n_clusters, config.max_iters, rng)
        traces.append(tuple(trace))
        if best is None or trace[-1] < best[2][-1]:
            best = (labels, centroids, trace)

    labels, centroids, trace = best
    assignment = {sorted_ids[i]: int(labels[i]) for i in range(len(sorted_ids))}
    return Clustering(assignment, centroids, float(trace[-1]), tuple(traces))


def _single_run(
    x_unit: np.ndarray, n_clusters: int, max_iters: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    centroids = _seed_plus_plus(x_unit, n_clusters, rng)
    labels: np.ndarray | None = None
    trace: list[float] = []
    converged = False
    for _ in range(max_iters):
        sims = x_unit @ centroids.T
        new_labels = np.argmax(sims, axis=1)  # first max: ties to lowest index
        trace.append(_objective(sims, new_labels))
        if labels is not None and np.array_equal(new_labels, labels):
            converged = True
            labels = new_labels
            break
        labels = new_labels
        centroids = _update_centroids(x_unit, labels, n_clusters, sims)
    if not converged:
        # centroids moved after the last assignment; take one final pass so
        # the returned labels are optimal against the returned centroids
        sims = x_unit @ centroids.T
        labels = np.argmax(sims, axis=1)
        trace.append(_objective(sims, labels))
    return labels, centroids, trace


def _objective(sims: np.ndarray, labels: np.ndarray) -> float:
    return float((1.0 - sims[np.arange(len(labels)), labels]).sum())


def _seed_plus_plus(x_unit: np.ndarray, n_clusters: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding with cosine distance as the weight."""
    n = x_unit.shape[0]
    chosen = [int(rng.integers(n))]
    min_dist = np.maximum(1.0 - x_unit @ x_unit[chosen[0]], 0.0)
    for _ in range(1, n_clusters):
        total = float(min_dist.sum())
        if total <= _EPS:
            # all remaining points coincide with a chosen centroid; fall back
            # to the lowest unchosen index
            remaining = sorted(set(range(n)) - set(chosen))
            idx = remaining[0]
        else:
            idx = int(rng.choice(n, p=min_dist / total))
        chosen.append(idx)
        min_dist = np.minimum(min_dist, np.maximum(1.0 - x_unit @ x_unit[idx], 0.0))
    return x_unit[chosen].copy()


def _update_centroids(
    x_unit: np.ndarray, labels: np.ndarray, n_clusters: int, sims: np.ndarray
) -> np.ndarray:
    centroids = np.zeros((n_clusters, x_unit.shape[1]))
    empty: list[int] = []
    for j in range(n_clusters):
        members = x_unit[labels == j]
        if members.shape[0] == 0:
            empty.append(j)
            continue
        mean = members.mean(axis=0)
        norm = np.linalg.norm(mean)
        if norm <= _EPS:
            empty.append(j)
            continue
        centroids[j] = mean / norm
    if empty:
        # reseed each empty cluster with the point currently worst served
        # (lowest cosine to its assigned centroid); distinct points per cluster
        assigned = sims[np.arange(len(labels)), labels]
        worst_first = np.argsort(assigned, kind="stable")
        for j, idx in zip(empty, worst_first):
            centroids[j] = x_unit[idx]
    return centroids
