"""Fixtures for change faithfulness tests."""

from __future__ import annotations

import numpy as np
import pytest

from change_faithfulness.generators import (
    ClusterGenSpec,
    Dataset,
    DistanceGenSpec,
    Merge,
    Split,
    gen_cluster_pair,
    gen_distance_pair,
)
from change_faithfulness.graph import Clustering, Drawing, DynamicPair, TimeSlice


@pytest.fixture
def path3() -> TimeSlice:
    """Return the path 0-1-2."""
    return TimeSlice.from_edge_list(3, [(0, 1), (1, 2)])


@pytest.fixture
def path10() -> TimeSlice:
    """Return a path on ten vertices."""
    return TimeSlice.from_edge_list(10, [(i, i + 1) for i in range(9)])


@pytest.fixture
def cycle8() -> TimeSlice:
    """Return a cycle on eight vertices."""
    return TimeSlice.from_edge_list(8, [(i, (i + 1) % 8) for i in range(8)])


@pytest.fixture
def k4() -> TimeSlice:
    """Return the complete graph on four vertices."""
    return TimeSlice.from_edge_list(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


@pytest.fixture
def line_drawing3() -> Drawing:
    """Return the path 0-1-2 drawn on a line at unit spacing."""
    return Drawing([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])


@pytest.fixture
def two_triangles() -> DynamicPair:
    """Return two linked triangles that merge into one cluster."""
    slice1 = TimeSlice.from_edge_list(
        6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]
    )
    slice2 = slice1.with_edges(slice1.edges | {(0, 3), (1, 4), (2, 5), (1, 3)})
    return DynamicPair(
        slice1=slice1,
        slice2=slice2,
        clustering1=Clustering.from_labels([0, 0, 0, 1, 1, 1]),
        clustering2=Clustering.from_labels([0, 0, 0, 0, 0, 0]),
    )


@pytest.fixture
def cluster_spec() -> ClusterGenSpec:
    """Return a small recipe with one merge and one split."""
    return ClusterGenSpec(
        base_vertex_count=4,
        cluster_size_range=(6, 8),
        events=(Merge(cluster_a=0, cluster_b=1), Split(cluster=2)),
        seed=11,
    )


@pytest.fixture
def cluster_pair(cluster_spec: ClusterGenSpec) -> DynamicPair:
    """Return the pair generated from the small cluster recipe."""
    return gen_cluster_pair(cluster_spec)


@pytest.fixture
def distance_spec() -> DistanceGenSpec:
    """Return a small path-backbone recipe."""
    return DistanceGenSpec(vertex_count=30, backbone="path", shortcut_count=3, seed=5)


@pytest.fixture
def distance_pair(distance_spec: DistanceGenSpec) -> DynamicPair:
    """Return the pair generated from the small distance recipe."""
    return gen_distance_pair(distance_spec)


@pytest.fixture
def cluster_dataset(cluster_pair: DynamicPair) -> Dataset:
    """Return the small cluster pair as a named dataset."""
    return Dataset(dataset_id="cluster_00", pair=cluster_pair)


@pytest.fixture
def distance_dataset(distance_pair: DynamicPair) -> Dataset:
    """Return the small distance pair as a named dataset."""
    return Dataset(dataset_id="distance_00", pair=distance_pair)


@pytest.fixture
def rng() -> np.random.Generator:
    """Return a seeded generator for random test inputs."""
    return np.random.default_rng(1234)
