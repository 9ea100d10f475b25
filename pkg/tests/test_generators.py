"""Tests for the synthetic dataset generators."""

from __future__ import annotations

import numpy as np
import pytest

from change_faithfulness.const import (
    DEFAULT_MERGE_DENSITY,
    DEFAULT_SPLIT_DENSITY,
    DENSITY_TOLERANCE,
)
from change_faithfulness.exceptions import InvalidSpecError
from change_faithfulness.generators import (
    ClusterGenSpec,
    DistanceGenSpec,
    Merge,
    Split,
    gen_cluster_pair,
    gen_distance_pair,
    generate_cluster_datasets,
    generate_distance_datasets,
    random_cluster_spec,
    random_distance_spec,
)
from change_faithfulness.graph import DynamicPair, diameter


def _event_edge_counts(
    pair: DynamicPair,
) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Return (edges, pairs) of every merged union and of every split cut."""
    assert pair.clustering1 is not None
    assert pair.clustering2 is not None
    first = pair.clustering1
    second = pair.clustering2.labels
    edges = pair.slice2.edges

    merges = []
    for label in np.unique(second).tolist():
        union = np.flatnonzero(second == label)
        if len(set(first.labels[union].tolist())) > 1:
            joined = set(union.tolist())
            inside = sum(1 for u, v in edges if u in joined and v in joined)
            merges.append((inside, len(joined) * (len(joined) - 1) // 2))

    splits = []
    for cluster in range(first.cluster_count):
        members = first.members(cluster)
        labels = second[members]
        if len(set(labels.tolist())) == 2:
            half = set(members[labels == labels[0]].tolist())
            other = set(members[labels != labels[0]].tolist())
            cross = sum(
                1
                for u, v in edges
                if (u in half and v in other) or (v in half and u in other)
            )
            splits.append((cross, len(half) * len(other)))
    return merges, splits


class TestClusterGenSpec:
    """Tests for cluster recipe validation."""

    def test_defaults(self) -> None:
        """Test the default recipe is valid."""
        spec = ClusterGenSpec()

        assert spec.base_vertex_count == 20
        assert spec.cluster_size_range == (10, 40)
        assert spec.events == ()

    def test_base_vertex_limit(self) -> None:
        """Test the base graph size limit."""
        with pytest.raises(InvalidSpecError):
            ClusterGenSpec(base_vertex_count=31)

    def test_merge_with_itself(self) -> None:
        """Test that a cluster cannot merge with itself."""
        with pytest.raises(InvalidSpecError):
            ClusterGenSpec(base_vertex_count=4, events=(Merge(1, 1),))

    def test_unknown_cluster(self) -> None:
        """Test that events must name existing clusters."""
        with pytest.raises(InvalidSpecError, match="unknown cluster"):
            ClusterGenSpec(base_vertex_count=4, events=(Split(9),))

    def test_cluster_in_two_events(self) -> None:
        """Test that a cluster takes part in at most one event."""
        with pytest.raises(InvalidSpecError):
            ClusterGenSpec(base_vertex_count=4, events=(Merge(0, 1), Split(1)))

    def test_cluster_size_range(self) -> None:
        """Test the cluster size bounds."""
        with pytest.raises(InvalidSpecError):
            ClusterGenSpec(cluster_size_range=(8, 5))


class TestGenClusterPair:
    """Tests for cluster pair generation."""

    def test_clusterings(self, cluster_pair: DynamicPair) -> None:
        """Test one merge and one split keep the cluster count."""
        assert cluster_pair.clustering1 is not None
        assert cluster_pair.clustering2 is not None
        assert cluster_pair.clustering1.cluster_count == 4
        assert cluster_pair.clustering2.cluster_count == 4
        assert 24 <= cluster_pair.vertex_count <= 32
        assert cluster_pair.clustering1.cluster_sizes.min() >= 6

    def test_both_slices_connected(self, cluster_pair: DynamicPair) -> None:
        """Test that both slices are connected."""
        assert cluster_pair.slice1.is_connected()
        assert cluster_pair.slice2.is_connected()

    def test_merge_only_adds_edges(self, cluster_pair: DynamicPair) -> None:
        """Test new edges lie inside the merged clusters."""
        assert cluster_pair.clustering1 is not None
        labels = cluster_pair.clustering1.labels
        added = cluster_pair.slice2.edges - cluster_pair.slice1.edges

        assert added
        assert all(labels[u] in (0, 1) and labels[v] in (0, 1) for u, v in added)

    def test_split_only_deletes_edges(self, cluster_pair: DynamicPair) -> None:
        """Test removed edges lie inside the split cluster."""
        assert cluster_pair.clustering1 is not None
        labels = cluster_pair.clustering1.labels
        removed = cluster_pair.slice1.edges - cluster_pair.slice2.edges

        assert all(labels[u] == 2 and labels[v] == 2 for u, v in removed)

    def test_event_labels(self, cluster_pair: DynamicPair) -> None:
        """Test merged clusters share a label and the split one gets two."""
        assert cluster_pair.clustering1 is not None
        assert cluster_pair.clustering2 is not None
        first = cluster_pair.clustering1
        second = cluster_pair.clustering2.labels

        merged = np.concatenate([first.members(0), first.members(1)])
        assert len(set(second[merged].tolist())) == 1
        assert len(set(second[first.members(2)].tolist())) == 2
        assert len(set(second[first.members(3)].tolist())) == 1

    def test_deterministic(self, cluster_spec: ClusterGenSpec) -> None:
        """Test that a recipe always yields the same pair."""
        first = gen_cluster_pair(cluster_spec)
        second = gen_cluster_pair(cluster_spec)

        assert first.slice1 == second.slice1
        assert first.slice2 == second.slice2
        assert first.clustering2 == second.clustering2

    def test_no_events(self) -> None:
        """Test that a recipe without events keeps the graph."""
        pair = gen_cluster_pair(
            ClusterGenSpec(base_vertex_count=3, cluster_size_range=(4, 5), seed=2)
        )

        assert pair.slice1 == pair.slice2
        assert pair.clustering1 == pair.clustering2


class TestEventDensities:
    """Tests for connectivity, size and density targets over many seeds."""

    @pytest.mark.parametrize("seed", range(10))
    def test_default_recipes(self, seed: int) -> None:
        """Test default recipes stay connected and hit their densities."""
        pair = gen_cluster_pair(random_cluster_spec(seed))
        merges, splits = _event_edge_counts(pair)

        assert 200 <= pair.vertex_count <= 1000
        assert pair.slice1.is_connected()
        assert pair.slice2.is_connected()
        assert merges
        assert splits
        for inside, pairs in merges:
            assert abs(inside / pairs - DEFAULT_MERGE_DENSITY) <= (
                DENSITY_TOLERANCE * DEFAULT_MERGE_DENSITY
            )
        for cross, pairs in splits:
            target = DEFAULT_SPLIT_DENSITY * pairs
            assert abs(cross - target) <= max(DENSITY_TOLERANCE * target, 0.5)

    @pytest.mark.parametrize("seed", range(10))
    def test_large_clusters_within_tolerance(self, seed: int) -> None:
        """Test split densities land within tolerance once halves are large."""
        pair = gen_cluster_pair(random_cluster_spec(seed, cluster_size_range=(40, 50)))
        merges, splits = _event_edge_counts(pair)

        assert 800 <= pair.vertex_count <= 1000
        assert pair.slice2.is_connected()
        for cross, pairs in splits:
            assert cross > 0
            assert abs(cross / pairs - DEFAULT_SPLIT_DENSITY) <= (
                DENSITY_TOLERANCE * DEFAULT_SPLIT_DENSITY
            )
        for inside, pairs in merges:
            assert abs(inside / pairs - DEFAULT_MERGE_DENSITY) <= (
                DENSITY_TOLERANCE * DEFAULT_MERGE_DENSITY
            )

    @pytest.mark.parametrize("vertex_count", [20, 300, None])
    def test_distance_diameter_ratio(self, vertex_count: int | None) -> None:
        """Test ten distance pairs at least halve the diameter."""
        options = {} if vertex_count is None else {"vertex_count": vertex_count}
        datasets = generate_distance_datasets(10, 0, **options)

        for dataset in datasets:
            pair = dataset.pair
            assert 20 <= pair.vertex_count <= 300
            if vertex_count is not None:
                assert pair.vertex_count == vertex_count
            assert pair.slice2.is_connected()
            assert diameter(pair.slice2) <= 0.5 * diameter(pair.slice1)


class TestGenDistancePair:
    """Tests for distance pair generation."""

    def test_diameter_shrinks(self, distance_pair: DynamicPair) -> None:
        """Test that shortcuts at least halve the diameter."""
        assert diameter(distance_pair.slice2) <= 0.5 * diameter(distance_pair.slice1)
        assert diameter(distance_pair.slice1) >= 8

    def test_only_adds_shortcuts(self, distance_pair: DynamicPair) -> None:
        """Test the second slice extends the first one."""
        slice1, slice2 = distance_pair.slices()

        assert slice1.edges < slice2.edges
        assert slice2.edge_count - slice1.edge_count >= 3
        assert slice1.edge_count == slice1.vertex_count - 1

    def test_no_clusterings(self, distance_pair: DynamicPair) -> None:
        """Test that distance pairs carry no ground truth clusters."""
        assert not distance_pair.has_clusterings

    def test_zero_shortcuts(self) -> None:
        """Test that no shortcuts leaves the graph unchanged."""
        pair = gen_distance_pair(
            DistanceGenSpec(vertex_count=25, backbone="path", shortcut_count=0, seed=1)
        )

        assert pair.slice1 == pair.slice2

    def test_tree_backbone(self) -> None:
        """Test the tree backbone is a connected tree."""
        pair = gen_distance_pair(
            DistanceGenSpec(vertex_count=60, backbone="tree", shortcut_count=0, seed=3)
        )

        assert pair.slice1.is_connected()
        assert pair.slice1.edge_count == 59

    @pytest.mark.parametrize(
        "options",
        [
            {"vertex_count": 10},
            {"vertex_count": 301},
            {"backbone": "star"},
            {"shortcut_count": -1},
            {"diameter_ratio": 1.0},
            {"min_diameter": 1},
        ],
    )
    def test_invalid_spec(self, options: dict) -> None:
        """Test recipe validation."""
        with pytest.raises(InvalidSpecError):
            DistanceGenSpec(**options)


class TestRandomSpecs:
    """Tests for randomized recipes and dataset batches."""

    def test_random_cluster_spec_events(self) -> None:
        """Test event counts of a random recipe."""
        spec = random_cluster_spec(5)
        merges = [event for event in spec.events if isinstance(event, Merge)]
        splits = [event for event in spec.events if isinstance(event, Split)]

        assert 1 <= len(merges) <= 2
        assert 1 <= len(splits) <= 2

    def test_random_cluster_spec_fixed_counts(self) -> None:
        """Test fixing the event counts."""
        spec = random_cluster_spec(5, base_vertex_count=6, merges=2, splits=2)

        assert len(spec.events) == 4

    def test_random_cluster_spec_too_many_events(self) -> None:
        """Test that events need enough base vertices."""
        with pytest.raises(InvalidSpecError):
            random_cluster_spec(5, base_vertex_count=4, merges=2, splits=1)

    def test_random_distance_spec(self) -> None:
        """Test the drawn ranges and alternating backbones."""
        even = random_distance_spec(9, 0)
        odd = random_distance_spec(9, 1)

        assert 20 <= even.vertex_count <= 300
        assert 2 <= even.shortcut_count <= 5
        assert even.backbone == "tree"
        assert odd.backbone == "path"

    def test_generate_cluster_datasets(self) -> None:
        """Test ids and determinism of a cluster batch."""
        options = {"base_vertex_count": 6, "cluster_size_range": (5, 8)}

        first = generate_cluster_datasets(2, 1, **options)
        second = generate_cluster_datasets(2, 1, **options)

        assert [dataset.dataset_id for dataset in first] == ["cluster_00", "cluster_01"]
        for a, b in zip(first, second, strict=True):
            assert a.pair.slice1 == b.pair.slice1
            assert a.pair.slice2 == b.pair.slice2
        assert all(dataset.pair.has_clusterings for dataset in first)

    def test_generate_distance_datasets(self) -> None:
        """Test ids and sizes of a distance batch."""
        datasets = generate_distance_datasets(2, 4, vertex_count=40)

        assert [dataset.dataset_id for dataset in datasets] == [
            "distance_00",
            "distance_01",
        ]
        assert all(dataset.pair.vertex_count == 40 for dataset in datasets)

    def test_count_must_be_positive(self) -> None:
        """Test that a batch needs at least one dataset."""
        with pytest.raises(InvalidSpecError):
            generate_distance_datasets(0, 4)
