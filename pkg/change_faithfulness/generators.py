"""Synthetic dynamic graph pairs with cluster events and diameter-shrinking shortcuts."""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.sparse import csgraph

from .const import (
    BACKBONE_PATH,
    BACKBONE_TREE,
    DEFAULT_BASE_EDGE_PROBABILITY,
    DEFAULT_BASE_VERTEX_COUNT,
    DEFAULT_CLUSTER_SIZE_RANGE,
    DEFAULT_DIAMETER_RATIO,
    DEFAULT_INTER_EDGE_COUNT,
    DEFAULT_INTRA_DENSITY,
    DEFAULT_MERGE_DENSITY,
    DEFAULT_MIN_DIAMETER,
    DEFAULT_SHORTCUT_COUNT,
    DEFAULT_SPLIT_DENSITY,
    DENSITY_TOLERANCE,
    MAX_BASE_VERTEX_COUNT,
    MAX_DISTANCE_VERTICES,
    MAX_GENERATION_ATTEMPTS,
    MIN_DISTANCE_VERTICES,
    PATH_BACKBONE_SHARE,
    TREE_ATTACH_WINDOW,
)
from .exceptions import InfeasibleSpecError, InvalidSpecError
from .graph import Clustering, DynamicPair, Edge, TimeSlice, diameter, normalize_edge
from .seeding import derive_seed

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class Merge:
    """Join two clusters by adding edges until the union reaches a density."""

    cluster_a: int
    cluster_b: int
    target_density: float = DEFAULT_MERGE_DENSITY


@dataclass(frozen=True)
class Split:
    """Cut a cluster in two halves by deleting edges between them.

    ``target_intra_density`` is the density of the edges left between the
    halves, relative to every possible cross pair.
    """

    cluster: int
    target_intra_density: float = DEFAULT_SPLIT_DENSITY


ClusterEvent = Merge | Split


@dataclass(frozen=True)
class ClusterGenSpec:
    """Recipe for a pair whose second slice merges or splits clusters."""

    base_vertex_count: int = DEFAULT_BASE_VERTEX_COUNT
    cluster_size_range: tuple[int, int] = DEFAULT_CLUSTER_SIZE_RANGE
    intra_density: float = DEFAULT_INTRA_DENSITY
    inter_edge_count: int = DEFAULT_INTER_EDGE_COUNT
    events: tuple[ClusterEvent, ...] = ()
    seed: int = 0
    base_edge_probability: float = DEFAULT_BASE_EDGE_PROBABILITY

    def __post_init__(self) -> None:
        """Validate the recipe."""
        if not 1 <= self.base_vertex_count <= MAX_BASE_VERTEX_COUNT:
            raise InvalidSpecError(
                f"base_vertex_count must be in [1, {MAX_BASE_VERTEX_COUNT}], "
                f"got {self.base_vertex_count}"
            )
        low, high = self.cluster_size_range
        if not 2 <= low <= high:
            raise InvalidSpecError(
                f"cluster_size_range must satisfy 2 <= min <= max, got {low, high}"
            )
        if not 0.0 < self.intra_density <= 1.0:
            raise InvalidSpecError(f"intra_density must be in (0, 1], got {self.intra_density}")
        if self.inter_edge_count < 1:
            raise InvalidSpecError("inter_edge_count must be positive")
        if not 0.0 <= self.base_edge_probability <= 1.0:
            raise InvalidSpecError("base_edge_probability must be in [0, 1]")
        touched: list[int] = []
        for event in self.events:
            if isinstance(event, Merge):
                if event.cluster_a == event.cluster_b:
                    raise InvalidSpecError(f"Merge of cluster {event.cluster_a} with itself")
                if not 0.0 < event.target_density <= 1.0:
                    raise InvalidSpecError("Merge target_density must be in (0, 1]")
                touched += [event.cluster_a, event.cluster_b]
            else:
                if not 0.0 <= event.target_intra_density < 1.0:
                    raise InvalidSpecError("Split target_intra_density must be in [0, 1)")
                touched.append(event.cluster)
        for cluster in touched:
            if not 0 <= cluster < self.base_vertex_count:
                raise InvalidSpecError(f"Event references unknown cluster {cluster}")
        if len(set(touched)) != len(touched):
            raise InvalidSpecError("A cluster may take part in at most one event")


@dataclass(frozen=True)
class DistanceGenSpec:
    """Recipe for a long-diameter graph and a shortcut-augmented successor."""

    vertex_count: int = 100
    backbone: str = BACKBONE_TREE
    shortcut_count: int = DEFAULT_SHORTCUT_COUNT
    seed: int = 0
    diameter_ratio: float = DEFAULT_DIAMETER_RATIO
    min_diameter: int = DEFAULT_MIN_DIAMETER

    def __post_init__(self) -> None:
        """Validate the recipe."""
        if not MIN_DISTANCE_VERTICES <= self.vertex_count <= MAX_DISTANCE_VERTICES:
            raise InvalidSpecError(
                f"vertex_count must be in [{MIN_DISTANCE_VERTICES}, "
                f"{MAX_DISTANCE_VERTICES}], got {self.vertex_count}"
            )
        if self.backbone not in (BACKBONE_TREE, BACKBONE_PATH):
            raise InvalidSpecError(f"Unknown backbone {self.backbone!r}")
        if self.shortcut_count < 0:
            raise InvalidSpecError("shortcut_count must not be negative")
        if not 0.0 < self.diameter_ratio < 1.0:
            raise InvalidSpecError("diameter_ratio must be in (0, 1)")
        if self.min_diameter < 2:
            raise InvalidSpecError("min_diameter must be at least 2")


@dataclass(frozen=True)
class Dataset:
    """A named dynamic pair."""

    dataset_id: str
    pair: DynamicPair = field(compare=False)


def _attach_tree(vertices: list[int], rng: np.random.Generator) -> set[Edge]:
    """Return a random spanning tree over ``vertices`` by random attachment."""
    return {
        normalize_edge(vertices[i], vertices[int(rng.integers(i))])
        for i in range(1, len(vertices))
    }


def _cluster_graph(
    vertices: list[int], density: float, rng: np.random.Generator
) -> set[Edge]:
    """Return a connected random graph on ``vertices`` with the target density."""
    edges = _attach_tree(vertices, rng)
    possible = len(vertices) * (len(vertices) - 1) // 2
    wanted = max(len(edges), int(round(density * possible)))
    candidates = [
        normalize_edge(u, v)
        for u, v in itertools.combinations(vertices, 2)
        if normalize_edge(u, v) not in edges
    ]
    order = rng.permutation(len(candidates))
    edges.update(candidates[i] for i in order[: wanted - len(edges)])
    return edges


def _cross_edges(
    first: np.ndarray, second: np.ndarray, count: int, rng: np.random.Generator
) -> set[Edge]:
    """Return ``count`` distinct random edges between two vertex groups."""
    if count > first.size * second.size:
        raise InfeasibleSpecError(
            f"Cannot place {count} edges between groups of "
            f"{first.size} and {second.size} vertices"
        )
    chosen = rng.choice(first.size * second.size, size=count, replace=False)
    return {
        normalize_edge(first[i // second.size], second[i % second.size])
        for i in np.sort(chosen)
    }


def _is_connected(vertex_count: int, edges: set[Edge]) -> bool:
    return TimeSlice(vertex_count=vertex_count, edges=frozenset(edges)).is_connected()


def _apply_merge(
    edges: set[Edge],
    members: list[np.ndarray],
    event: Merge,
    rng: np.random.Generator,
) -> None:
    first, second = members[event.cluster_a], members[event.cluster_b]
    union = set(first.tolist()) | set(second.tolist())
    current = sum(1 for u, v in edges if u in union and v in union)
    wanted = int(np.ceil(event.target_density * (len(union) * (len(union) - 1) // 2)))
    candidates = [
        normalize_edge(u, v)
        for u in first.tolist()
        for v in second.tolist()
        if normalize_edge(u, v) not in edges
    ]
    if wanted - current > len(candidates):
        raise InfeasibleSpecError(
            f"Merging clusters {event.cluster_a} and {event.cluster_b} cannot "
            f"reach density {event.target_density}"
        )
    order = rng.permutation(len(candidates))
    edges.update(candidates[i] for i in order[: max(0, wanted - current)])


def _cut_halves(
    edges: set[Edge],
    vertex_count: int,
    members: np.ndarray,
    event: Split,
    rng: np.random.Generator,
) -> tuple[np.ndarray, int, int]:
    """Delete cross edges between two random halves in place.

    Return the second half, the cross edges left and the target count.
    """
    shuffled = rng.permutation(members)
    half = set(shuffled[: members.size // 2].tolist())
    other = np.sort(shuffled[members.size // 2 :])
    other_set = set(other.tolist())
    cross = sorted(
        (u, v)
        for u, v in edges
        if (u in half and v in other_set) or (v in half and u in other_set)
    )
    allowed = int(np.floor(event.target_intra_density * len(half) * len(other_set) + 0.5))
    remaining = len(cross)
    for i in rng.permutation(len(cross)):
        if remaining <= allowed:
            break
        edges.discard(cross[i])
        if _is_connected(vertex_count, edges):
            remaining -= 1
        else:
            edges.add(cross[i])
    return other, remaining, allowed


def _apply_split(
    edges: set[Edge],
    vertex_count: int,
    members: np.ndarray,
    event: Split,
    rng: np.random.Generator,
) -> np.ndarray:
    """Thin the cross edges of a random halving; return the second half.

    The target is the cross pair count times ``target_intra_density``, rounded
    to the nearest edge. Cross edges whose removal would disconnect the graph
    are kept; the halving is redrawn up to MAX_GENERATION_ATTEMPTS times and
    the one closest to the target wins.
    """
    if members.size < 2:
        raise InfeasibleSpecError(f"Cluster {event.cluster} is too small to split")
    best: tuple[set[Edge], np.ndarray, int, int] | None = None
    for _ in range(MAX_GENERATION_ATTEMPTS):
        trial = set(edges)
        other, remaining, allowed = _cut_halves(trial, vertex_count, members, event, rng)
        if best is None or remaining - allowed < best[2] - best[3]:
            best = (trial, other, remaining, allowed)
        if remaining <= allowed:
            break
    assert best is not None
    trial, other, remaining, allowed = best
    edges.intersection_update(trial)

    pairs = (members.size // 2) * (members.size - members.size // 2)
    target = event.target_intra_density * pairs
    if abs(remaining - target) > max(DENSITY_TOLERANCE * target, 0.5):
        _LOGGER.debug(
            "Split of cluster %s keeps %s cross edges of %s pairs (target %s)",
            event.cluster,
            remaining,
            pairs,
            allowed,
        )
    return other


def gen_cluster_pair(spec: ClusterGenSpec) -> DynamicPair:
    """Expand a small base graph into clusters and apply merge/split events.

    Each base vertex becomes a connected random cluster at ``intra_density``;
    each base edge becomes ``inter_edge_count`` random edges between the two
    clusters. Merges only add edges, splits only delete them.
    """
    rng = np.random.default_rng(spec.seed)
    base = _attach_tree(list(range(spec.base_vertex_count)), rng)
    for u, v in itertools.combinations(range(spec.base_vertex_count), 2):
        if rng.random() < spec.base_edge_probability:
            base.add((u, v))

    low, high = spec.cluster_size_range
    sizes = rng.integers(low, high + 1, size=spec.base_vertex_count)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    vertex_count = int(offsets[-1])
    members = [np.arange(offsets[c], offsets[c + 1]) for c in range(spec.base_vertex_count)]
    labels1 = np.repeat(np.arange(spec.base_vertex_count), sizes)

    edges1: set[Edge] = set()
    for cluster_members in members:
        edges1 |= _cluster_graph(cluster_members.tolist(), spec.intra_density, rng)
    for u, v in sorted(base):
        edges1 |= _cross_edges(members[u], members[v], spec.inter_edge_count, rng)
    if not _is_connected(vertex_count, edges1):
        raise InfeasibleSpecError("First slice is not connected")

    edges2 = set(edges1)
    labels2 = labels1.copy()
    next_label = spec.base_vertex_count
    for event in spec.events:
        if isinstance(event, Merge):
            _apply_merge(edges2, members, event, rng)
            labels2[members[event.cluster_b]] = event.cluster_a
        else:
            second_half = _apply_split(
                edges2, vertex_count, members[event.cluster], event, rng
            )
            labels2[second_half] = next_label
            next_label += 1
    if not _is_connected(vertex_count, edges2):
        raise InfeasibleSpecError("Second slice is not connected")

    _LOGGER.debug(
        "Generated cluster pair: %s vertices, %s -> %s edges, %s events",
        vertex_count,
        len(edges1),
        len(edges2),
        len(spec.events),
    )
    return DynamicPair(
        slice1=TimeSlice(vertex_count=vertex_count, edges=frozenset(edges1)),
        slice2=TimeSlice(vertex_count=vertex_count, edges=frozenset(edges2)),
        clustering1=Clustering.from_labels(labels1.tolist()),
        clustering2=Clustering.from_labels(labels2.tolist()),
    )


def _backbone(spec: DistanceGenSpec, rng: np.random.Generator) -> set[Edge]:
    n = spec.vertex_count
    if spec.backbone == BACKBONE_PATH:
        spine = max(2, int(round(PATH_BACKBONE_SHARE * n)))
        edges = {(i, i + 1) for i in range(spine - 1)}
        for vertex in range(spine, n):
            edges.add(normalize_edge(vertex, int(rng.integers(vertex))))
        return edges
    # attaching to one of the last few vertices keeps the tree deep
    return {
        normalize_edge(i, int(rng.integers(max(0, i - TREE_ATTACH_WINDOW), i)))
        for i in range(1, n)
    }


def _longest_path(slice_: TimeSlice) -> list[int]:
    """Return one shortest path realizing the diameter."""
    distances, predecessors = csgraph.shortest_path(
        slice_.adjacency(), directed=False, unweighted=True, return_predecessors=True
    )
    source, target = np.unravel_index(int(np.argmax(distances)), distances.shape)
    path = [int(target)]
    while path[-1] != source:
        path.append(int(predecessors[source, path[-1]]))
    return path[::-1]


def _add_shortcut(slice_: TimeSlice, rng: np.random.Generator) -> Edge | None:
    path = _longest_path(slice_)
    length = len(path) - 1
    if length < 2:
        return None
    reach = length // 3
    i = int(rng.integers(0, reach + 1))
    j = length - int(rng.integers(0, reach + 1))
    if j - i < 2:
        i, j = 0, length
    return normalize_edge(path[i], path[j])


def gen_distance_pair(spec: DistanceGenSpec) -> DynamicPair:
    """Build a long-diameter graph and add chords that shrink its diameter.

    ``shortcut_count`` chords are added across the current longest shortest
    path; if the diameter is still above ``diameter_ratio`` of the original,
    further chords are added the same way, up to the vertex count.
    """
    rng = np.random.default_rng(spec.seed)
    slice1 = TimeSlice(vertex_count=spec.vertex_count, edges=frozenset(_backbone(spec, rng)))
    diameter1 = diameter(slice1)
    if diameter1 < spec.min_diameter:
        raise InfeasibleSpecError(
            f"Backbone diameter {diameter1} is below the floor {spec.min_diameter}"
        )
    if spec.shortcut_count == 0:
        return DynamicPair(slice1=slice1, slice2=slice1)

    slice2 = slice1
    added = 0
    limit = spec.shortcut_count + spec.vertex_count
    while added < spec.shortcut_count or diameter(slice2) > spec.diameter_ratio * diameter1:
        if added >= limit:
            raise InfeasibleSpecError(
                f"Diameter {diameter(slice2)} still above "
                f"{spec.diameter_ratio} x {diameter1} after {added} shortcuts"
            )
        shortcut = _add_shortcut(slice2, rng)
        if shortcut is None:
            break
        slice2 = slice2.with_edges(slice2.edges | {shortcut})
        added += 1
        if added == spec.shortcut_count + 1:
            _LOGGER.warning(
                "Adding shortcuts beyond %s to reach diameter ratio %s",
                spec.shortcut_count,
                spec.diameter_ratio,
            )
    if diameter(slice2) > spec.diameter_ratio * diameter1:
        raise InfeasibleSpecError(
            f"No shortcut can shrink diameter {diameter(slice2)} further"
        )
    _LOGGER.debug(
        "Generated distance pair: %s vertices, diameter %s -> %s, %s shortcuts",
        spec.vertex_count,
        diameter1,
        diameter(slice2),
        added,
    )
    return DynamicPair(slice1=slice1, slice2=slice2)


def random_cluster_spec(
    seed: int,
    base_vertex_count: int = DEFAULT_BASE_VERTEX_COUNT,
    *,
    merges: int | None = None,
    splits: int | None = None,
    **options: Any,
) -> ClusterGenSpec:
    """Return a validation recipe with one or two merges and one or two splits.

    ``merges``/``splits`` fix the event counts; ``options`` are passed on to
    ClusterGenSpec (cluster_size_range, intra_density, inter_edge_count).
    """
    rng = np.random.default_rng(seed)
    merge_count = int(rng.integers(1, 3)) if merges is None else merges
    split_count = int(rng.integers(1, 3)) if splits is None else splits
    if merge_count < 0 or split_count < 0:
        raise InvalidSpecError("Event counts must not be negative")
    if 2 * merge_count + split_count > base_vertex_count:
        raise InvalidSpecError(
            f"{merge_count} merges and {split_count} splits need at least "
            f"{2 * merge_count + split_count} base vertices"
        )
    order = rng.permutation(base_vertex_count).tolist()
    events: list[ClusterEvent] = [
        Merge(cluster_a=order[2 * i], cluster_b=order[2 * i + 1])
        for i in range(merge_count)
    ]
    events += [Split(cluster=order[2 * merge_count + i]) for i in range(split_count)]
    return ClusterGenSpec(
        base_vertex_count=base_vertex_count,
        events=tuple(events),
        seed=derive_seed(seed, 0),
        **options,
    )


def random_distance_spec(
    seed: int,
    index: int = 0,
    *,
    vertex_count: int | None = None,
    backbone: str | None = None,
    shortcut_count: int | None = None,
    **options: Any,
) -> DistanceGenSpec:
    """Return a validation recipe with 20-300 vertices, alternating backbones.

    Explicit arguments replace the random draws; ``options`` are passed on to
    DistanceGenSpec (diameter_ratio, min_diameter).
    """
    rng = np.random.default_rng(seed)
    drawn_count = int(rng.integers(MIN_DISTANCE_VERTICES, MAX_DISTANCE_VERTICES + 1))
    drawn_shortcuts = int(rng.integers(2, 6))
    return DistanceGenSpec(
        vertex_count=drawn_count if vertex_count is None else vertex_count,
        backbone=backbone or (BACKBONE_TREE if index % 2 == 0 else BACKBONE_PATH),
        shortcut_count=drawn_shortcuts if shortcut_count is None else shortcut_count,
        seed=derive_seed(seed, 0),
        **options,
    )


def _generate(
    prefix: str,
    count: int,
    seed: int,
    build: Callable[[int, int], DynamicPair],
) -> list[Dataset]:
    """Build ``count`` datasets, redrawing a recipe that turns out infeasible."""
    if count < 1:
        raise InvalidSpecError(f"count must be positive, got {count}")
    datasets = []
    for index in range(count):
        for attempt in range(MAX_GENERATION_ATTEMPTS):
            try:
                pair = build(derive_seed(seed, index, attempt), index)
            except InfeasibleSpecError as err:
                _LOGGER.warning("Dataset %s attempt %s: %s", index, attempt + 1, err)
                continue
            datasets.append(Dataset(dataset_id=f"{prefix}_{index:02d}", pair=pair))
            break
        else:
            raise InfeasibleSpecError(
                f"Dataset {index} infeasible after {MAX_GENERATION_ATTEMPTS} attempts"
            )
    return datasets


def generate_cluster_datasets(count: int, seed: int, **options: Any) -> list[Dataset]:
    """Generate ``count`` cluster-event datasets with per-dataset derived seeds.

    ``options`` are forwarded to random_cluster_spec.
    """
    return _generate(
        "cluster",
        count,
        seed,
        lambda sub_seed, _: gen_cluster_pair(random_cluster_spec(sub_seed, **options)),
    )


def generate_distance_datasets(count: int, seed: int, **options: Any) -> list[Dataset]:
    """Generate ``count`` diameter-shrink datasets with per-dataset derived seeds.

    ``options`` are forwarded to random_distance_spec.
    """
    return _generate(
        "distance",
        count,
        seed,
        lambda sub_seed, index: gen_distance_pair(
            random_distance_spec(sub_seed, index, **options)
        ),
    )
