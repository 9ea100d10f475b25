"""Tests for dataset and coordinate files."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from change_faithfulness.exceptions import (
    DisconnectedGraphError,
    MissingCoordinatesError,
    ParseError,
    StorageError,
)
from change_faithfulness.generators import Dataset
from change_faithfulness.graph import Clustering, Drawing, DynamicPair, TimeSlice
from change_faithfulness.storage import (
    load_coordinates,
    load_dataset,
    load_datasets,
    save_coordinates,
    save_dataset,
    save_datasets,
)


def _write(path: Path, record: object) -> Path:
    path.write_text(json.dumps(record), encoding="utf-8")
    return path


class TestDatasetFiles:
    """Tests for dataset JSON files."""

    def test_save_and_load(self, tmp_path: Path, two_triangles: DynamicPair) -> None:
        """Test a saved pair loads back equal."""
        path = tmp_path / "pair.json"

        save_dataset(two_triangles, path)
        loaded = load_dataset(path)

        assert loaded.slice1 == two_triangles.slice1
        assert loaded.slice2 == two_triangles.slice2
        assert loaded.clustering1 == two_triangles.clustering1
        assert loaded.clustering2 == two_triangles.clustering2

    def test_file_layout(self, tmp_path: Path, two_triangles: DynamicPair) -> None:
        """Test the JSON keys and sorted edges."""
        path = tmp_path / "pair.json"

        save_dataset(two_triangles, path)
        record = json.loads(path.read_text(encoding="utf-8"))

        assert record["n"] == 6
        assert record["edges1"][0] == [0, 1]
        assert record["clusters1"] == [0, 0, 0, 1, 1, 1]
        assert path.read_bytes().endswith(b"\n")

    def test_clusterings_optional(self, tmp_path: Path, distance_pair: DynamicPair) -> None:
        """Test a pair without clusterings omits the keys."""
        path = tmp_path / "distance.json"

        save_dataset(distance_pair, path)

        assert "clusters1" not in json.loads(path.read_text(encoding="utf-8"))
        assert not load_dataset(path).has_clusterings

    def test_invalid_json(self, tmp_path: Path) -> None:
        """Test that broken JSON is reported with its line."""
        path = tmp_path / "broken.json"
        path.write_text('{"n": 3,\n "edges1": [', encoding="utf-8")

        with pytest.raises(ParseError, match="line 2"):
            load_dataset(path)

    def test_missing_key(self, tmp_path: Path) -> None:
        """Test that both edge lists are required."""
        path = _write(tmp_path / "pair.json", {"n": 2, "edges1": [[0, 1]]})

        with pytest.raises(ParseError):
            load_dataset(path)

    def test_endpoint_out_of_range(self, tmp_path: Path) -> None:
        """Test that edges must name existing vertices."""
        path = _write(
            tmp_path / "pair.json", {"n": 2, "edges1": [[0, 2]], "edges2": [[0, 1]]}
        )

        with pytest.raises(ParseError, match="outside 0..1"):
            load_dataset(path)

    def test_label_count(self, tmp_path: Path) -> None:
        """Test that a clustering labels every vertex."""
        path = _write(
            tmp_path / "pair.json",
            {"n": 2, "edges1": [[0, 1]], "edges2": [[0, 1]], "clusters1": [0]},
        )

        with pytest.raises(ParseError, match="1 labels for 2 vertices"):
            load_dataset(path)

    def test_labels_kept_as_written(self, tmp_path: Path, path3: TimeSlice) -> None:
        """Test that labels not in first-appearance order load back unchanged."""
        path = tmp_path / "pair.json"
        pair = DynamicPair(
            slice1=path3,
            slice2=path3,
            clustering1=Clustering(np.array([1, 0, 0])),
            clustering2=Clustering(np.array([2, 0, 1])),
        )

        save_dataset(pair, path)
        loaded = load_dataset(path)

        assert loaded.clustering1 == pair.clustering1
        assert loaded.clustering2 == pair.clustering2

    def test_gapped_labels_renumbered(self, tmp_path: Path) -> None:
        """Test that labels with gaps are renumbered by first appearance."""
        path = _write(
            tmp_path / "pair.json",
            {
                "n": 3,
                "edges1": [[0, 1], [1, 2]],
                "edges2": [[0, 1], [1, 2]],
                "clusters1": [7, 3, 7],
            },
        )

        loaded = load_dataset(path)

        assert loaded.clustering1 is not None
        assert loaded.clustering1.labels.tolist() == [0, 1, 0]

    def test_disconnected(self, tmp_path: Path) -> None:
        """Test that disconnected slices are rejected unless allowed."""
        path = _write(
            tmp_path / "pair.json",
            {"n": 4, "edges1": [[0, 1], [2, 3]], "edges2": [[0, 1], [1, 2], [2, 3]]},
        )

        with pytest.raises(DisconnectedGraphError):
            load_dataset(path)
        assert load_dataset(path, require_connected=False).vertex_count == 4

    def test_missing_file(self, tmp_path: Path) -> None:
        """Test that an unreadable file is a storage error."""
        with pytest.raises(StorageError):
            load_dataset(tmp_path / "absent.json")

    def test_directory_round_trip(
        self, tmp_path: Path, two_triangles: DynamicPair, distance_pair: DynamicPair
    ) -> None:
        """Test batch files are named by index and loaded by stem."""
        datasets = [
            Dataset(dataset_id="a", pair=two_triangles),
            Dataset(dataset_id="b", pair=distance_pair),
        ]

        paths = save_datasets(datasets, tmp_path / "batch")
        loaded = load_datasets(tmp_path / "batch")

        assert [path.name for path in paths] == ["dataset_00.json", "dataset_01.json"]
        assert [dataset.dataset_id for dataset in loaded] == ["dataset_00", "dataset_01"]
        assert loaded[1].pair.slice2 == distance_pair.slice2

    def test_empty_directory(self, tmp_path: Path) -> None:
        """Test that a batch directory needs dataset files."""
        with pytest.raises(StorageError, match="No dataset files"):
            load_datasets(tmp_path)

    def test_not_a_directory(self, tmp_path: Path) -> None:
        """Test that a batch must be a directory."""
        with pytest.raises(StorageError, match="not a directory"):
            load_datasets(tmp_path / "absent")


class TestCoordinateFiles:
    """Tests for coordinate files."""

    def test_save_and_load(self, tmp_path: Path) -> None:
        """Test coordinates survive a save exactly."""
        drawing = Drawing([[0.1, -2.5], [1e-17, 3.0], [2.0 / 3.0, 7.25]])
        path = tmp_path / "drawing.txt"

        save_coordinates(drawing, path)

        assert load_coordinates(path, 3) == drawing
        assert path.read_text(encoding="utf-8").splitlines()[0] == "0 0.1 -2.5"

    def test_comments_and_order(self, tmp_path: Path) -> None:
        """Test comments, blank lines and records in any order."""
        path = tmp_path / "drawing.txt"
        path.write_text("# header\n1 2 3\n\n0 0.5 1  # origin\n", encoding="utf-8")

        assert load_coordinates(path, 2).positions.tolist() == [[0.5, 1.0], [2.0, 3.0]]

    @pytest.mark.parametrize(
        ("content", "message"),
        [
            ("0 1\n", "expected 'index x y'"),
            ("0 a 1\n", "could not convert"),
            ("0 inf 1\n", "finite"),
            ("5 1 1\n", "outside"),
            ("0 1 1\n0 2 2\n", "duplicate"),
        ],
    )
    def test_malformed(self, tmp_path: Path, content: str, message: str) -> None:
        """Test malformed records are reported."""
        path = tmp_path / "drawing.txt"
        path.write_text(content, encoding="utf-8")

        with pytest.raises(ParseError, match=message):
            load_coordinates(path, 2)

    def test_missing_vertex(self, tmp_path: Path) -> None:
        """Test that every vertex needs coordinates."""
        path = tmp_path / "drawing.txt"
        path.write_text("0 1 1\n", encoding="utf-8")

        with pytest.raises(MissingCoordinatesError, match="first \\[1\\]"):
            load_coordinates(path, 2)
