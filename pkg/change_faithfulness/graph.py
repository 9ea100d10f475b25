"""Data model and distance primitives for dynamic graph pairs."""

from __future__ import annotations

import logging
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse import csgraph
from scipy.spatial.distance import pdist, squareform

from .exceptions import (
    DegenerateDrawingError,
    DisconnectedGraphError,
    InvalidGraphError,
    SizeMismatchError,
)

_LOGGER = logging.getLogger(__name__)

Edge = tuple[int, int]


def normalize_edge(u: int, v: int) -> Edge:
    """Return the edge as an ordered (low, high) pair."""
    u, v = int(u), int(v)
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, eq=True)
class TimeSlice:
    """One time slice of a dynamic graph: a vertex count and an edge set."""

    vertex_count: int
    edges: frozenset[Edge]

    def __post_init__(self) -> None:
        """Validate the slice."""
        if self.vertex_count < 1:
            raise InvalidGraphError(
                f"vertex_count must be positive, got {self.vertex_count}"
            )
        for u, v in self.edges:
            if u == v:
                raise InvalidGraphError(f"Self loop ({u}, {v}) is not allowed")
            if u > v:
                raise InvalidGraphError(f"Edge ({u}, {v}) is not normalized")
            if u < 0 or v >= self.vertex_count:
                raise InvalidGraphError(
                    f"Edge ({u}, {v}) out of range for {self.vertex_count} vertices"
                )

    @classmethod
    def from_edge_list(cls, vertex_count: int, edges: Iterable[Sequence[int]]) -> TimeSlice:
        """Create a slice from an edge list, rejecting loops and repeats."""
        seen: set[Edge] = set()
        for position, edge in enumerate(edges):
            u, v = int(edge[0]), int(edge[1])
            if u == v:
                raise InvalidGraphError(f"Edge {position} is a self loop ({u}, {v})")
            if min(u, v) < 0 or max(u, v) >= vertex_count:
                raise InvalidGraphError(
                    f"Edge {position} ({u}, {v}) out of range for {vertex_count} vertices"
                )
            normalized = normalize_edge(u, v)
            if normalized in seen:
                raise InvalidGraphError(f"Edge {position} ({u}, {v}) is repeated")
            seen.add(normalized)
        return cls(vertex_count=vertex_count, edges=frozenset(seen))

    @property
    def edge_count(self) -> int:
        """Return the number of edges."""
        return len(self.edges)

    @cached_property
    def edge_array(self) -> np.ndarray:
        """Return the edges as a sorted (m, 2) integer array."""
        if not self.edges:
            return np.empty((0, 2), dtype=np.int64)
        return np.array(sorted(self.edges), dtype=np.int64)

    @cached_property
    def degrees(self) -> np.ndarray:
        """Return the degree of every vertex."""
        return np.bincount(self.edge_array.ravel(), minlength=self.vertex_count)

    def adjacency(self) -> csr_matrix:
        """Return the symmetric sparse adjacency matrix."""
        rows = self.edge_array[:, 0]
        cols = self.edge_array[:, 1]
        data = np.ones(2 * len(rows), dtype=np.float64)
        return csr_matrix(
            (data, (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
            shape=(self.vertex_count, self.vertex_count),
        )

    def has_edge(self, u: int, v: int) -> bool:
        """Return True if u and v are adjacent."""
        return normalize_edge(u, v) in self.edges

    def is_connected(self) -> bool:
        """Return True if every vertex is reachable from every other."""
        return len(connected_components(self)) == 1

    def induced_subgraph(self, vertices: Sequence[int]) -> TimeSlice:
        """Return the subgraph induced by ``vertices``, relabeled 0..len-1."""
        index = {int(v): i for i, v in enumerate(vertices)}
        edges = {
            normalize_edge(index[u], index[v])
            for u, v in self.edges
            if u in index and v in index
        }
        return TimeSlice(vertex_count=len(index), edges=frozenset(edges))

    def with_edges(self, edges: Iterable[Edge]) -> TimeSlice:
        """Return a slice over the same vertices with a new edge set."""
        return TimeSlice(
            vertex_count=self.vertex_count,
            edges=frozenset(normalize_edge(u, v) for u, v in edges),
        )


@dataclass(frozen=True, eq=False)
class Clustering:
    """A partition of the vertex set, one label in [0, cluster_count) per vertex."""

    labels: np.ndarray

    def __post_init__(self) -> None:
        """Validate the labels."""
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.size == 0:
            raise InvalidGraphError("Clustering needs a non-empty 1-D label sequence")
        if labels.min() < 0:
            raise InvalidGraphError("Cluster labels must be non-negative")
        present = np.unique(labels)
        if present.size != int(labels.max()) + 1:
            raise InvalidGraphError(
                f"Cluster labels must cover 0..{int(labels.max())} without gaps"
            )
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_labels(cls, labels: Iterable[Hashable]) -> Clustering:
        """Relabel arbitrary identifiers to 0..k-1 by first appearance."""
        mapping: dict[Hashable, int] = {}
        canonical = [mapping.setdefault(label, len(mapping)) for label in labels]
        return cls(labels=np.array(canonical, dtype=np.int64))

    @property
    def size(self) -> int:
        """Return the number of clustered elements."""
        return int(self.labels.size)

    @property
    def cluster_count(self) -> int:
        """Return the number of distinct clusters."""
        return int(self.labels.max()) + 1

    @property
    def cluster_sizes(self) -> np.ndarray:
        """Return the size of every cluster."""
        return np.bincount(self.labels, minlength=self.cluster_count)

    def members(self, cluster: int) -> np.ndarray:
        """Return the elements of ``cluster`` in increasing order."""
        return np.flatnonzero(self.labels == cluster)

    def canonical(self) -> Clustering:
        """Return the clustering relabeled by first appearance."""
        return Clustering.from_labels(self.labels.tolist())

    def same_partition(self, other: Clustering) -> bool:
        """Return True if both describe the same partition up to renaming."""
        return self.size == other.size and bool(
            np.array_equal(self.canonical().labels, other.canonical().labels)
        )

    def __eq__(self, other: object) -> bool:
        """Compare label sequences exactly."""
        if not isinstance(other, Clustering):
            return NotImplemented
        return bool(np.array_equal(self.labels, other.labels))

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class Drawing:
    """2D coordinates for every vertex of one slice."""

    positions: np.ndarray

    def __post_init__(self) -> None:
        """Validate the coordinates."""
        positions = np.array(self.positions, dtype=np.float64)
        if positions.ndim != 2 or positions.shape[1] != 2:
            raise DegenerateDrawingError(
                f"Drawing needs an (n, 2) array, got shape {positions.shape}"
            )
        if not np.all(np.isfinite(positions)):
            raise DegenerateDrawingError("Drawing coordinates must be finite")
        positions.setflags(write=False)
        object.__setattr__(self, "positions", positions)

    @property
    def vertex_count(self) -> int:
        """Return the number of drawn vertices."""
        return int(self.positions.shape[0])

    def transformed(
        self, scale: float = 1.0, angle: float = 0.0, offset: Sequence[float] = (0.0, 0.0)
    ) -> Drawing:
        """Return the drawing under a similarity transform."""
        rotation = np.array(
            [[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]]
        )
        return Drawing(scale * self.positions @ rotation.T + np.asarray(offset))

    def __eq__(self, other: object) -> bool:
        """Compare coordinates exactly."""
        if not isinstance(other, Drawing):
            return NotImplemented
        return bool(np.array_equal(self.positions, other.positions))

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=True)
class DynamicPair:
    """Two time slices over one vertex set, with optional ground truth clusterings."""

    slice1: TimeSlice
    slice2: TimeSlice
    clustering1: Clustering | None = field(default=None)
    clustering2: Clustering | None = field(default=None)

    def __post_init__(self) -> None:
        """Validate the shared vertex set."""
        if self.slice1.vertex_count != self.slice2.vertex_count:
            raise SizeMismatchError(
                f"Slices have {self.slice1.vertex_count} and "
                f"{self.slice2.vertex_count} vertices"
            )
        for name, clustering in (
            ("clustering1", self.clustering1),
            ("clustering2", self.clustering2),
        ):
            if clustering is not None and clustering.size != self.vertex_count:
                raise SizeMismatchError(
                    f"{name} covers {clustering.size} vertices, "
                    f"expected {self.vertex_count}"
                )

    @property
    def vertex_count(self) -> int:
        """Return the size of the shared vertex set."""
        return self.slice1.vertex_count

    @property
    def has_clusterings(self) -> bool:
        """Return True if both ground truth clusterings are present."""
        return self.clustering1 is not None and self.clustering2 is not None

    def slices(self) -> tuple[TimeSlice, TimeSlice]:
        """Return both slices."""
        return self.slice1, self.slice2


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric pairwise distances with a zero diagonal."""

    values: np.ndarray

    def __post_init__(self) -> None:
        """Freeze the matrix."""
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise SizeMismatchError(f"Distance matrix must be square, got {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        """Return the number of vertices."""
        return int(self.values.shape[0])

    def upper(self) -> np.ndarray:
        """Return the i < j entries in row-major order."""
        rows, cols = np.triu_indices(self.n, k=1)
        return self.values[rows, cols]

    def max(self) -> float:
        """Return the largest entry."""
        return float(self.values.max()) if self.n else 0.0

    def __getitem__(self, key: tuple[int, int]) -> float:
        """Return one entry."""
        return float(self.values[key])


def connected_components(slice_: TimeSlice) -> list[list[int]]:
    """Return the connected components, ordered by their smallest vertex."""
    count, labels = csgraph.connected_components(slice_.adjacency(), directed=False)
    components: list[list[int]] = [[] for _ in range(count)]
    for vertex, label in enumerate(labels):
        components[label].append(vertex)
    return sorted(components, key=lambda component: component[0])


def all_pairs_graph_distance(slice_: TimeSlice) -> DistanceMatrix:
    """Return hop-count shortest path distances between every vertex pair."""
    if slice_.vertex_count > 1:
        components = connected_components(slice_)
        if len(components) > 1:
            raise DisconnectedGraphError(components[1], len(components))
    distances = csgraph.shortest_path(
        slice_.adjacency(), method="D", directed=False, unweighted=True
    )
    return DistanceMatrix(distances)


def diameter(slice_: TimeSlice) -> int:
    """Return the largest hop distance in a connected slice."""
    if slice_.vertex_count < 2:
        raise InvalidGraphError("Diameter needs at least two vertices")
    return int(round(all_pairs_graph_distance(slice_).max()))


def all_pairs_geometric_distance(drawing: Drawing) -> DistanceMatrix:
    """Return Euclidean distances between every pair of drawn vertices."""
    if drawing.vertex_count < 2:
        return DistanceMatrix(np.zeros((drawing.vertex_count, drawing.vertex_count)))
    return DistanceMatrix(squareform(pdist(drawing.positions)))


def edge_lengths(drawing: Drawing, slice_: TimeSlice) -> np.ndarray:
    """Return the drawn length of every edge of the slice, in sorted edge order."""
    if drawing.vertex_count != slice_.vertex_count:
        raise SizeMismatchError(
            f"Drawing has {drawing.vertex_count} points for "
            f"{slice_.vertex_count} vertices"
        )
    edges = slice_.edge_array
    delta = drawing.positions[edges[:, 0]] - drawing.positions[edges[:, 1]]
    return np.hypot(delta[:, 0], delta[:, 1])


def average_edge_length(
    drawings: tuple[Drawing, Drawing], pair: DynamicPair
) -> float:
    """Return the pooled mean edge length: E_1 drawn in D_1 and E_2 drawn in D_2."""
    drawing1, drawing2 = drawings
    if pair.slice1.edge_count == 0 or pair.slice2.edge_count == 0:
        raise InvalidGraphError("Average edge length needs an edge in each slice")
    lengths = np.concatenate(
        [edge_lengths(drawing1, pair.slice1), edge_lengths(drawing2, pair.slice2)]
    )
    mean = float(lengths.sum() / lengths.size)
    if mean == 0.0:
        raise DegenerateDrawingError("All edges are drawn with zero length")
    return mean


def bounding_box_size(drawing: Drawing) -> float:
    """Return max(width, height) of the axis-aligned bounding box."""
    extent = np.ptp(drawing.positions, axis=0) if drawing.vertex_count else np.zeros(2)
    size = float(extent.max())
    if size == 0.0:
        raise DegenerateDrawingError("All points of the drawing coincide")
    return size
