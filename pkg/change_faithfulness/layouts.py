"""Built-in layouts: stress majorization, Fruchterman-Reingold and a cluster faithful layout."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .clustering import ClusteringIndex, cq
from .const import (
    CLUSTER_RADIUS,
    CLUSTER_SPACING,
    DEFAULT_FR_IDEAL_LENGTH,
    DEFAULT_FR_ITERATIONS,
    DEFAULT_SMACOF_MAX_ITER,
    DEFAULT_SMACOF_TOL,
    FR_MIN_DISTANCE,
    LAYOUT_CLUSTER_FAITHFUL,
    LAYOUT_FR,
    LAYOUT_STRESS_MAJORIZATION,
    MAX_LAYOUT_ATTEMPTS,
)
from .exceptions import InvalidGraphError, LayoutNotFaithfulError
from .graph import (
    Clustering,
    DistanceMatrix,
    Drawing,
    DynamicPair,
    TimeSlice,
    all_pairs_graph_distance,
    normalize_edge,
)
from .seeding import derive_seed

_LOGGER = logging.getLogger(__name__)

LayoutFunction = Callable[[DynamicPair, int], tuple[Drawing, Drawing]]


@dataclass
class SmacofResult:
    """Result of a stress majorization run."""

    positions: np.ndarray
    stress_history: list[float] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        """Return the number of Guttman transforms applied."""
        return len(self.stress_history) - 1


def random_layout(vertex_count: int, seed: int, scale: float | None = None) -> Drawing:
    """Return uniformly random positions in a square of side ``scale``."""
    rng = np.random.default_rng(seed)
    side = math.sqrt(vertex_count) if scale is None else scale
    return Drawing(rng.uniform(0.0, side, size=(vertex_count, 2)))


def _upper_stress(weights: np.ndarray, target: np.ndarray, distances: np.ndarray) -> float:
    rows, cols = np.triu_indices(target.shape[0], k=1)
    residual = distances[rows, cols] - target[rows, cols]
    return float(np.sum(weights[rows, cols] * residual**2))


def smacof(
    graph_dist: DistanceMatrix,
    init: np.ndarray,
    max_iter: int = DEFAULT_SMACOF_MAX_ITER,
    tol: float = DEFAULT_SMACOF_TOL,
) -> SmacofResult:
    """Minimize weighted stress with Guttman transforms, weights δ⁻².

    Stops when the relative stress decrease falls below ``tol`` or after
    ``max_iter`` transforms. The recorded stress never increases.
    """
    target = graph_dist.values
    n = target.shape[0]
    positions = np.array(init, dtype=np.float64)
    if n < 2:
        return SmacofResult(positions=positions, stress_history=[0.0])

    weights = np.zeros_like(target)
    off_diagonal = ~np.eye(n, dtype=bool)
    weights[off_diagonal] = target[off_diagonal] ** -2.0
    laplacian = np.diag(weights.sum(axis=1)) - weights
    laplacian_pinv = np.linalg.pinv(laplacian)

    distances = squareform(pdist(positions))
    history = [_upper_stress(weights, target, distances)]
    for iteration in range(max_iter):
        ratio = np.zeros_like(target)
        np.divide(
            weights * target, distances, out=ratio, where=off_diagonal & (distances > 0)
        )
        b_matrix = -ratio
        b_matrix[np.diag_indices(n)] = ratio.sum(axis=1)
        positions = laplacian_pinv @ (b_matrix @ positions)
        distances = squareform(pdist(positions))
        current = _upper_stress(weights, target, distances)
        previous = history[-1]
        history.append(current)
        if previous == 0.0 or (previous - current) / previous < tol:
            _LOGGER.debug("SMACOF converged after %s iterations", iteration + 1)
            break
    return SmacofResult(positions=positions, stress_history=history)


def layout_stress_majorization(
    slice_: TimeSlice,
    seed: int,
    max_iter: int = DEFAULT_SMACOF_MAX_ITER,
    tol: float = DEFAULT_SMACOF_TOL,
) -> Drawing:
    """Draw a connected slice by stress majorization from a seeded random start."""
    graph_dist = all_pairs_graph_distance(slice_)
    init = random_layout(slice_.vertex_count, seed).positions
    result = smacof(graph_dist, init, max_iter=max_iter, tol=tol)
    return Drawing(result.positions)


def layout_fr(
    slice_: TimeSlice,
    seed: int,
    iterations: int = DEFAULT_FR_ITERATIONS,
    ideal_length: float = DEFAULT_FR_IDEAL_LENGTH,
) -> Drawing:
    """Draw a slice with Fruchterman-Reingold forces and linear cooling.

    Repulsion k²/d acts on every pair, attraction d²/k on every edge; each
    vertex moves along its net force by at most the current temperature.
    """
    n = slice_.vertex_count
    if n < 1:
        raise InvalidGraphError("Cannot lay out an empty slice")
    k = ideal_length
    side = k * math.sqrt(n)
    positions = random_layout(n, seed, scale=side).positions.copy()
    if n == 1:
        return Drawing(positions)

    sources = slice_.edge_array[:, 0]
    targets = slice_.edge_array[:, 1]
    start_temperature = side / 10.0
    for iteration in range(iterations):
        temperature = start_temperature * (1.0 - iteration / iterations)

        delta = positions[:, None, :] - positions[None, :, :]
        distance = np.maximum(np.hypot(delta[..., 0], delta[..., 1]), FR_MIN_DISTANCE)
        displacement = ((k * k / distance**2)[..., None] * delta).sum(axis=1)

        edge_delta = positions[sources] - positions[targets]
        edge_length = np.hypot(edge_delta[:, 0], edge_delta[:, 1])
        attraction = (edge_length / k)[:, None] * edge_delta
        np.add.at(displacement, sources, -attraction)
        np.add.at(displacement, targets, attraction)

        length = np.hypot(displacement[:, 0], displacement[:, 1])
        step = np.zeros_like(length)
        np.divide(np.minimum(length, temperature), length, out=step, where=length > 0)
        positions += displacement * step[:, None]
    return Drawing(positions)


def _quotient_slice(slice_: TimeSlice, clustering: Clustering) -> TimeSlice:
    """Return the graph with one vertex per cluster and an edge per linked cluster pair."""
    labels = clustering.labels
    edges = {
        normalize_edge(labels[u], labels[v])
        for u, v in slice_.edges
        if labels[u] != labels[v]
    }
    return TimeSlice(vertex_count=clustering.cluster_count, edges=frozenset(edges))


def _cluster_centroids(quotient: TimeSlice, seed: int) -> np.ndarray | None:
    """Place clusters with stress majorization, min centroid distance CLUSTER_SPACING radii."""
    if quotient.vertex_count == 1:
        return np.zeros((1, 2))
    if quotient.is_connected():
        centroids = layout_stress_majorization(quotient, seed).positions
    else:
        centroids = random_layout(quotient.vertex_count, seed).positions
    closest = float(pdist(centroids).min())
    if closest <= 0.0:
        return None
    return centroids * (CLUSTER_SPACING * CLUSTER_RADIUS / closest)


def _cluster_interior(slice_: TimeSlice, members: np.ndarray, seed: int) -> np.ndarray:
    """Lay out one cluster with FR, centered and fitted into CLUSTER_RADIUS."""
    if members.size == 1:
        return np.zeros((1, 2))
    interior = layout_fr(slice_.induced_subgraph(members.tolist()), seed).positions
    interior = interior - interior.mean(axis=0)
    radius = float(np.hypot(interior[:, 0], interior[:, 1]).max())
    return interior * (CLUSTER_RADIUS / radius) if radius > 0 else interior


def _clustered_drawing(
    slice_: TimeSlice, clustering: Clustering, seed: int
) -> Drawing | None:
    centroids = _cluster_centroids(_quotient_slice(slice_, clustering), seed)
    if centroids is None:
        return None
    positions = np.zeros((slice_.vertex_count, 2))
    for cluster in range(clustering.cluster_count):
        members = clustering.members(cluster)
        interior = _cluster_interior(slice_, members, derive_seed(seed, cluster))
        positions[members] = centroids[cluster] + interior
    return Drawing(positions)


def cluster_faithful_layout(
    pair: DynamicPair,
    seed: int,
    *,
    clustering_seed: int | None = None,
    attempts: int = MAX_LAYOUT_ATTEMPTS,
) -> tuple[Drawing, Drawing]:
    """Draw both slices so that k-means recovers each ground truth clustering.

    Clusters sit at stress-majorized centroids of the cluster graph, far apart
    relative to their radius, and each cluster is drawn internally with FR.
    Each drawing is verified with CQ = 1 (k-means seeded with
    ``clustering_seed``, default ``seed``) and redrawn with a new sub-seed on
    failure.
    """
    if pair.clustering1 is None or pair.clustering2 is None:
        raise InvalidGraphError("Cluster faithful layout needs both clusterings")
    verify_seed = seed if clustering_seed is None else clustering_seed
    drawings: list[Drawing] = []
    for position, (slice_, clustering) in enumerate(
        ((pair.slice1, pair.clustering1), (pair.slice2, pair.clustering2)), start=1
    ):
        for attempt in range(attempts):
            drawing = _clustered_drawing(
                slice_, clustering, derive_seed(seed, position, attempt)
            )
            if (
                drawing is not None
                and cq(clustering, drawing, ClusteringIndex.ARI, verify_seed) == 1.0
            ):
                drawings.append(drawing)
                break
            _LOGGER.warning(
                "Layout of slice %s is not cluster faithful (attempt %s), retrying",
                position,
                attempt + 1,
            )
        else:
            raise LayoutNotFaithfulError(
                f"Slice {position} is not cluster faithful after {attempts} attempts"
            )
    return drawings[0], drawings[1]


def _stress_majorization_pair(pair: DynamicPair, seed: int) -> tuple[Drawing, Drawing]:
    return (
        layout_stress_majorization(pair.slice1, seed),
        layout_stress_majorization(pair.slice2, seed),
    )


def _fr_pair(pair: DynamicPair, seed: int) -> tuple[Drawing, Drawing]:
    return layout_fr(pair.slice1, seed), layout_fr(pair.slice2, seed)


BUILTIN_LAYOUTS: dict[str, LayoutFunction] = {
    LAYOUT_STRESS_MAJORIZATION: _stress_majorization_pair,
    LAYOUT_FR: _fr_pair,
    LAYOUT_CLUSTER_FAITHFUL: cluster_faithful_layout,
}
