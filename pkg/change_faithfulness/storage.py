"""Dataset JSON and coordinate file formats."""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np
import voluptuous as vol

from .const import DATASET_FILE_PATTERN
from .exceptions import (
    DisconnectedGraphError,
    InvalidGraphError,
    MissingCoordinatesError,
    ParseError,
    SizeMismatchError,
    StorageError,
)
from .generators import Dataset
from .graph import Clustering, Drawing, DynamicPair, TimeSlice, connected_components

_LOGGER = logging.getLogger(__name__)

KEY_VERTEX_COUNT = "n"
KEY_EDGES = ("edges1", "edges2")
KEY_CLUSTERS = ("clusters1", "clusters2")

_EDGE = vol.ExactSequence([int, int])

DATASET_SCHEMA = vol.Schema(
    {
        vol.Required(KEY_VERTEX_COUNT): vol.All(int, vol.Range(min=1)),
        vol.Required(KEY_EDGES[0]): [_EDGE],
        vol.Required(KEY_EDGES[1]): [_EDGE],
        vol.Optional(KEY_CLUSTERS[0]): [int],
        vol.Optional(KEY_CLUSTERS[1]): [int],
    }
)


def read_text_file(path: Path) -> str:
    """Return a file's text, raising StorageError on I/O failure."""
    try:
        return path.read_text(encoding="utf-8")
    except OSError as err:
        raise StorageError(f"Cannot read {path}: {err}") from err


def write_text_file(path: Path, text: str) -> None:
    """Write text with LF line endings, creating parent directories."""
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as err:
        raise StorageError(f"Cannot write {path}: {err}") from err


def _slice_from_record(path: Path, key: str, n: int, edges: list[list[int]]) -> TimeSlice:
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(
                f"{path}: {key} edge [{u}, {v}] has an endpoint outside 0..{n - 1}"
            )
    try:
        return TimeSlice.from_edge_list(n, edges)
    except InvalidGraphError as err:
        raise ParseError(f"{path}: {key}: {err}") from err


def _clustering_from_record(path: Path, key: str, labels: list[int]) -> Clustering:
    """Keep labels that already number clusters 0..k-1; renumber any others."""
    try:
        return Clustering(np.asarray(labels, dtype=np.int64))
    except InvalidGraphError:
        _LOGGER.debug("%s: renumbering %s by first appearance", path, key)
        return Clustering.from_labels(labels)


def load_dataset(path: str | Path, *, require_connected: bool = True) -> DynamicPair:
    """Load a dynamic pair from its JSON file.

    Clusterings are optional. Disconnected slices are rejected unless
    ``require_connected`` is False.
    """
    path = Path(path)
    try:
        raw: Any = json.loads(read_text_file(path))
    except json.JSONDecodeError as err:
        raise ParseError(f"{path}: line {err.lineno}: {err.msg}") from err
    try:
        record = DATASET_SCHEMA(raw)
    except vol.Invalid as err:
        raise ParseError(f"{path}: {err}") from err

    n = record[KEY_VERTEX_COUNT]
    slices = [_slice_from_record(path, key, n, record[key]) for key in KEY_EDGES]
    clusterings: list[Clustering | None] = []
    for key in KEY_CLUSTERS:
        labels = record.get(key)
        if labels is not None and len(labels) != n:
            raise ParseError(f"{path}: {key} has {len(labels)} labels for {n} vertices")
        clusterings.append(
            None if labels is None else _clustering_from_record(path, key, labels)
        )

    if require_connected:
        for slice_ in slices:
            components = connected_components(slice_)
            if len(components) > 1:
                raise DisconnectedGraphError(components[1], len(components))
    try:
        return DynamicPair(
            slice1=slices[0],
            slice2=slices[1],
            clustering1=clusterings[0],
            clustering2=clusterings[1],
        )
    except SizeMismatchError as err:
        raise ParseError(f"{path}: {err}") from err


def save_dataset(pair: DynamicPair, path: str | Path) -> None:
    """Write a dynamic pair as JSON."""
    record: dict[str, Any] = {KEY_VERTEX_COUNT: pair.vertex_count}
    for key, slice_ in zip(KEY_EDGES, pair.slices(), strict=True):
        record[key] = slice_.edge_array.tolist()
    for key, clustering in zip(
        KEY_CLUSTERS, (pair.clustering1, pair.clustering2), strict=True
    ):
        if clustering is not None:
            record[key] = clustering.labels.tolist()
    write_text_file(Path(path), json.dumps(record) + "\n")


def save_datasets(datasets: Sequence[Dataset], directory: str | Path) -> list[Path]:
    """Write each dataset as ``dataset_XX.json`` in ``directory``."""
    paths = []
    for index, dataset in enumerate(datasets):
        path = Path(directory) / DATASET_FILE_PATTERN.format(index=index)
        save_dataset(dataset.pair, path)
        paths.append(path)
    return paths


def load_datasets(directory: str | Path) -> list[Dataset]:
    """Load every ``*.json`` dataset of a directory, named by file stem."""
    directory = Path(directory)
    if not directory.is_dir():
        raise StorageError(f"{directory} is not a directory")
    paths = sorted(directory.glob("*.json"))
    if not paths:
        raise StorageError(f"No dataset files in {directory}")
    datasets = [Dataset(dataset_id=path.stem, pair=load_dataset(path)) for path in paths]
    _LOGGER.debug("Loaded %s datasets from %s", len(datasets), directory)
    return datasets


def load_coordinates(path: str | Path, expected_n: int) -> Drawing:
    """Load ``index x y`` records, one per vertex; ``#`` starts a comment."""
    path = Path(path)
    positions: dict[int, tuple[float, float]] = {}
    for lineno, line in enumerate(read_text_file(path).splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        fields = content.split()
        if len(fields) != 3:
            raise ParseError(f"{path}:{lineno}: expected 'index x y', got {content!r}")
        try:
            index = int(fields[0])
            x, y = float(fields[1]), float(fields[2])
        except ValueError as err:
            raise ParseError(f"{path}:{lineno}: {err}") from err
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ParseError(f"{path}:{lineno}: coordinates must be finite")
        if not 0 <= index < expected_n:
            raise ParseError(
                f"{path}:{lineno}: vertex {index} outside 0..{expected_n - 1}"
            )
        if index in positions:
            raise ParseError(f"{path}:{lineno}: duplicate vertex {index}")
        positions[index] = (x, y)

    if len(positions) != expected_n:
        missing = [i for i in range(expected_n) if i not in positions]
        raise MissingCoordinatesError(
            f"{path}: {len(missing)} of {expected_n} vertices have no coordinates, "
            f"first {missing[:10]}"
        )
    return Drawing([positions[i] for i in range(expected_n)])


def save_coordinates(drawing: Drawing, path: str | Path) -> None:
    """Write a drawing with shortest round-trip float text."""
    lines = [
        f"{index} {float(x)!r} {float(y)!r}"
        for index, (x, y) in enumerate(drawing.positions.tolist())
    ]
    write_text_file(Path(path), "".join(line + "\n" for line in lines))
