"""Clustering comparison indices, k-means and static cluster faithfulness."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from sklearn.metrics import adjusted_rand_score, fowlkes_mallows_score
from sklearn.metrics.cluster import contingency_matrix

from .const import (
    DEFAULT_KMEANS_MAX_ITER,
    DEFAULT_KMEANS_RESTARTS,
    DEFAULT_KMEANS_TOL,
    INDEX_ARI,
    INDEX_FMI,
)
from .exceptions import SizeMismatchError, TooFewPointsError
from .graph import Clustering, Drawing

_LOGGER = logging.getLogger(__name__)


class ClusteringIndex(StrEnum):
    """Supported clustering comparison indices."""

    ARI = INDEX_ARI
    FMI = INDEX_FMI


def _pairs(count: int) -> int:
    return count * (count - 1) // 2


def _require_same_size(a: Clustering, b: Clustering) -> None:
    if a.size != b.size:
        raise SizeMismatchError(f"Clusterings cover {a.size} and {b.size} elements")


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """Overlap counts between the clusters of two partitions."""

    counts: np.ndarray
    n: int

    @classmethod
    def from_clusterings(cls, a: Clustering, b: Clustering) -> ContingencyTable:
        """Build the table for two partitions of the same element set."""
        _require_same_size(a, b)
        counts = contingency_matrix(a.labels, b.labels).astype(np.int64)
        return cls(counts=counts, n=a.size)

    @property
    def same_pairs(self) -> int:
        """Return the number of pairs grouped together in both partitions."""
        return sum(_pairs(int(c)) for c in self.counts.ravel() if c > 1)

    @property
    def row_pairs(self) -> int:
        """Return the number of pairs grouped together in the first partition."""
        return sum(_pairs(int(c)) for c in self.counts.sum(axis=1))

    @property
    def column_pairs(self) -> int:
        """Return the number of pairs grouped together in the second partition."""
        return sum(_pairs(int(c)) for c in self.counts.sum(axis=0))

    @property
    def total_pairs(self) -> int:
        """Return the number of element pairs."""
        return _pairs(self.n)


def adjusted_rand_index(a: Clustering, b: Clustering) -> float:
    """Return the Adjusted Rand Index of two partitions.

    Partitions that agree on every pair, including the degenerate single
    cluster and all-singleton cases, score exactly 1.0.
    """
    _require_same_size(a, b)
    return float(adjusted_rand_score(a.labels, b.labels))


def fowlkes_mallows_index(a: Clustering, b: Clustering) -> float:
    """Return the Fowlkes-Mallows Index TP / sqrt((TP + FP)(TP + FN)).

    Two all-singleton partitions agree completely and score 1.0.
    """
    table = ContingencyTable.from_clusterings(a, b)
    if table.row_pairs == table.column_pairs == 0:
        return 1.0
    return float(fowlkes_mallows_score(a.labels, b.labels))


def compare(a: Clustering, b: Clustering, index: ClusteringIndex | str) -> float:
    """Return the similarity of two partitions under ``index``."""
    if ClusteringIndex(index) is ClusteringIndex.ARI:
        return adjusted_rand_index(a, b)
    return fowlkes_mallows_index(a, b)


def inertia(points: np.ndarray, clustering: Clustering) -> float:
    """Return the within-cluster sum of squared distances to the cluster means."""
    points = np.asarray(points, dtype=np.float64)
    total = 0.0
    for cluster in range(clustering.cluster_count):
        members = points[clustering.labels == cluster]
        total += float(((members - members.mean(axis=0)) ** 2).sum())
    return total


def _kmeans_plus_plus(
    points: np.ndarray, k: int, rng: np.random.Generator
) -> np.ndarray:
    """Pick k initial centers with D^2 weighting."""
    n_points = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n_points)]
    closest = ((points - centers[0]) ** 2).sum(axis=1)
    for i in range(1, k):
        probabilities = closest / closest.sum()
        centers[i] = points[rng.choice(n_points, p=probabilities)]
        closest = np.minimum(closest, ((points - centers[i]) ** 2).sum(axis=1))
    return centers


def _assign(points: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return nearest-center labels and squared distances to them."""
    squared = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = squared.argmin(axis=1)
    return labels, squared[np.arange(points.shape[0]), labels]


def _repair_empty(
    points: np.ndarray, centers: np.ndarray, labels: np.ndarray, squared: np.ndarray
) -> None:
    """Give every empty cluster the point farthest from its own center."""
    k = centers.shape[0]
    for cluster in range(k):
        sizes = np.bincount(labels, minlength=k)
        if sizes[cluster] > 0:
            continue
        movable = sizes[labels] > 1
        candidates = np.where(movable, squared, -1.0)
        farthest = int(candidates.argmax())
        labels[farthest] = cluster
        squared[farthest] = 0.0
        centers[cluster] = points[farthest]


def _lloyd(
    points: np.ndarray,
    k: int,
    rng: np.random.Generator,
    max_iter: int,
    tol: float,
) -> tuple[np.ndarray, float]:
    """Run one seeded k-means and return labels and inertia."""
    centers = _kmeans_plus_plus(points, k, rng)
    labels, squared = _assign(points, centers)
    _repair_empty(points, centers, labels, squared)
    for _ in range(max_iter):
        updated = np.array([points[labels == c].mean(axis=0) for c in range(k)])
        shift = float(np.sqrt(((updated - centers) ** 2).sum(axis=1)).max())
        centers = updated
        labels, squared = _assign(points, centers)
        _repair_empty(points, centers, labels, squared)
        if shift < tol:
            break
    centers = np.array([points[labels == c].mean(axis=0) for c in range(k)])
    return labels, float(((points - centers[labels]) ** 2).sum())


def kmeans(
    points: Sequence[Sequence[float]] | np.ndarray,
    k: int,
    seed: int,
    *,
    restarts: int = DEFAULT_KMEANS_RESTARTS,
    max_iter: int = DEFAULT_KMEANS_MAX_ITER,
    tol: float = DEFAULT_KMEANS_TOL,
) -> Clustering:
    """Partition points into k non-empty clusters minimizing within-class variance.

    k-means++ seeding and Lloyd iterations, repeated ``restarts`` times with
    sub-seeds spawned from ``seed``; the lowest inertia wins, ties going to
    the earliest restart.
    """
    points = np.asarray(points, dtype=np.float64)
    if k < 1:
        raise TooFewPointsError(f"k must be positive, got {k}")
    distinct = np.unique(points, axis=0).shape[0] if points.size else 0
    if k > distinct:
        raise TooFewPointsError(
            f"Cannot form {k} clusters from {distinct} distinct points"
        )
    if k == 1:
        return Clustering(np.zeros(points.shape[0], dtype=np.int64))

    best_labels: np.ndarray | None = None
    best_inertia = math.inf
    children = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF).spawn(restarts)
    for restart, child in enumerate(children):
        labels, value = _lloyd(points, k, np.random.default_rng(child), max_iter, tol)
        _LOGGER.debug("k-means restart %s: inertia %s", restart, value)
        if value < best_inertia:
            best_labels, best_inertia = labels, value

    assert best_labels is not None
    return Clustering.from_labels(best_labels.tolist())


def geometric_clustering(drawing: Drawing, k: int, seed: int) -> Clustering:
    """Cluster the vertices of a drawing by position."""
    return kmeans(drawing.positions, k, seed)


def cq(
    ground_truth: Clustering,
    drawing: Drawing,
    index: ClusteringIndex | str,
    seed: int,
) -> float:
    """Return how faithfully a drawing displays the ground truth clusters."""
    if ground_truth.size != drawing.vertex_count:
        raise SizeMismatchError(
            f"Clustering covers {ground_truth.size} vertices, "
            f"drawing has {drawing.vertex_count}"
        )
    geometric = geometric_clustering(drawing, ground_truth.cluster_count, seed)
    return compare(ground_truth, geometric, index)
