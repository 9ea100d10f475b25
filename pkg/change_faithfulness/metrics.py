"""Change faithfulness metrics: CCQ, DCQ1, DCQ2 and stress."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from .clustering import ClusteringIndex, compare
from .const import CHANGE_DISSIMILARITY, CHANGE_SIMILARITY
from .exceptions import DegenerateDrawingError, SizeMismatchError
from .graph import (
    Clustering,
    DistanceMatrix,
    Drawing,
    DynamicPair,
    TimeSlice,
    all_pairs_geometric_distance,
    all_pairs_graph_distance,
    average_edge_length,
)

_LOGGER = logging.getLogger(__name__)


class ChangeMeasure(StrEnum):
    """How a clustering index score becomes the Δ value compared by CCQ."""

    SIMILARITY = CHANGE_SIMILARITY
    DISSIMILARITY = CHANGE_DISSIMILARITY


def _relative_change(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Return |a - b| / max(a, b) elementwise, 0 where both are zero."""
    largest = np.maximum(first, second)
    change = np.zeros_like(largest)
    np.divide(np.abs(first - second), largest, out=change, where=largest > 0)
    return change


@dataclass(frozen=True)
class ClusterChangeInput:
    """Ground truth and geometric clustering Δ values under one change measure."""

    gt_change: float
    geo_change: float

    def __post_init__(self) -> None:
        """Validate the inputs."""
        for name, value in (("gt_change", self.gt_change), ("geo_change", self.geo_change)):
            if not math.isfinite(value) or not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")

    @classmethod
    def from_clusterings(
        cls,
        ground_truth: tuple[Clustering, Clustering],
        geometric: tuple[Clustering, Clustering],
        index: ClusteringIndex | str,
        measure: ChangeMeasure | str = ChangeMeasure.SIMILARITY,
    ) -> ClusterChangeInput:
        """Compare both clustering pairs under one index and change measure."""
        return cls(
            gt_change=clustering_delta(*ground_truth, index, measure),
            geo_change=clustering_delta(*geometric, index, measure),
        )


@dataclass(frozen=True, eq=False)
class DistanceChangeInput:
    """Graph theoretic and geometric distances of both slices plus target edge length."""

    graph_dist1: DistanceMatrix
    graph_dist2: DistanceMatrix
    geo_dist1: DistanceMatrix
    geo_dist2: DistanceMatrix
    tl: float

    def __post_init__(self) -> None:
        """Validate shapes and the target edge length."""
        sizes = {
            self.graph_dist1.n,
            self.graph_dist2.n,
            self.geo_dist1.n,
            self.geo_dist2.n,
        }
        if len(sizes) != 1:
            raise SizeMismatchError(f"Distance matrices disagree on n: {sorted(sizes)}")
        if not self.tl > 0:
            raise DegenerateDrawingError(f"Target edge length must be positive, got {self.tl}")

    @classmethod
    def from_drawings(
        cls, pair: DynamicPair, drawing1: Drawing, drawing2: Drawing
    ) -> DistanceChangeInput:
        """Compute every distance the DCQ metrics need for one drawing pair."""
        return cls(
            graph_dist1=all_pairs_graph_distance(pair.slice1),
            graph_dist2=all_pairs_graph_distance(pair.slice2),
            geo_dist1=all_pairs_geometric_distance(drawing1),
            geo_dist2=all_pairs_geometric_distance(drawing2),
            tl=average_edge_length((drawing1, drawing2), pair),
        )

    @property
    def n(self) -> int:
        """Return the vertex count."""
        return self.graph_dist1.n


def clustering_agreement(
    a: Clustering, b: Clustering, index: ClusteringIndex | str
) -> float:
    """Return clamp(index(a, b), 0, 1): 1 means no change."""
    return min(max(compare(a, b, index), 0.0), 1.0)


def clustering_change(
    a: Clustering, b: Clustering, index: ClusteringIndex | str
) -> float:
    """Return 1 - clamp(index(a, b), 0, 1): 0 means no change."""
    return 1.0 - clustering_agreement(a, b, index)


def clustering_delta(
    a: Clustering,
    b: Clustering,
    index: ClusteringIndex | str,
    measure: ChangeMeasure | str = ChangeMeasure.SIMILARITY,
) -> float:
    """Return the Δ value of two clusterings under ``measure``.

    ``similarity`` keeps the clamped index score, so CCQ becomes the ratio of
    the smaller to the larger agreement. ``dissimilarity`` uses
    :func:`clustering_change`.
    """
    if ChangeMeasure(measure) is ChangeMeasure.SIMILARITY:
        return clustering_agreement(a, b, index)
    return clustering_change(a, b, index)


def ccq(change: ClusterChangeInput) -> float:
    """Return cluster change faithfulness 1 - |gt - geo| / max(gt, geo).

    Two zero Δ values agree perfectly and give 1.0.
    """
    largest = max(change.gt_change, change.geo_change)
    if largest == 0.0:
        return 1.0
    return 1.0 - abs(change.gt_change - change.geo_change) / largest


def dcq1_terms(change: DistanceChangeInput) -> np.ndarray:
    """Return |Δ(i, j) - S(i, j) / tl| for every pair i < j."""
    graph_change = _relative_change(change.graph_dist1.upper(), change.graph_dist2.upper())
    geometric_change = _relative_change(change.geo_dist1.upper(), change.geo_dist2.upper())
    return np.abs(graph_change - geometric_change / change.tl)


def dcq1(change: DistanceChangeInput) -> float:
    """Return distance change faithfulness scaled by target edge length."""
    n = change.n
    if n < 2:
        raise SizeMismatchError("DCQ needs at least two vertices")
    return 1.0 - (2.0 / n**2) * float(np.sum(dcq1_terms(change)))


def dcq2_terms(change: DistanceChangeInput, diam1: int, diam2: int) -> np.ndarray:
    """Return ||δ'_1 - δ'_2| - |s'_1 - s'_2|| for every pair i < j."""
    max1 = change.geo_dist1.max()
    max2 = change.geo_dist2.max()
    if max1 == 0.0 or max2 == 0.0:
        raise DegenerateDrawingError("All points of a drawing coincide")
    graph_delta = np.abs(
        change.graph_dist1.upper() / diam1 - change.graph_dist2.upper() / diam2
    )
    geometric_delta = np.abs(change.geo_dist1.upper() / max1 - change.geo_dist2.upper() / max2)
    return np.abs(graph_delta - geometric_delta)


def dcq2(change: DistanceChangeInput, diam1: int, diam2: int) -> float:
    """Return distance change faithfulness scaled by the maximum distances."""
    n = change.n
    if n < 2:
        raise SizeMismatchError("DCQ needs at least two vertices")
    return 1.0 - (2.0 / n**2) * float(np.sum(dcq2_terms(change, diam1, diam2)))


def stress_from_distances(graph_dist: DistanceMatrix, geo_dist: DistanceMatrix) -> float:
    """Return normalized stress at the optimal drawing scale."""
    if graph_dist.n != geo_dist.n:
        raise SizeMismatchError(
            f"Distance matrices cover {graph_dist.n} and {geo_dist.n} vertices"
        )
    if graph_dist.n < 2:
        return 0.0
    ratio = geo_dist.upper() / graph_dist.upper()
    squared = float(np.sum(ratio**2))
    scale = float(np.sum(ratio)) / squared if squared > 0 else 0.0
    return float(np.sum((scale * ratio - 1.0) ** 2)) / ratio.size


def stress(slice_: TimeSlice, drawing: Drawing) -> float:
    """Return normalized stress of a drawing; 0 is perfectly distance faithful.

    Weights are δ⁻² and the drawing is rescaled by the closed-form optimal
    factor, so the value does not depend on the drawing's units.
    """
    if drawing.vertex_count != slice_.vertex_count:
        raise SizeMismatchError(
            f"Drawing has {drawing.vertex_count} points for "
            f"{slice_.vertex_count} vertices"
        )
    return stress_from_distances(
        all_pairs_graph_distance(slice_), all_pairs_geometric_distance(drawing)
    )


def raw_stress(graph_dist: DistanceMatrix, positions: np.ndarray) -> float:
    """Return Σ δ⁻² (s - δ)² over pairs i < j, the objective SMACOF majorizes."""
    geo = all_pairs_geometric_distance(Drawing(positions)).upper()
    delta = graph_dist.upper()
    return float(np.sum(((geo - delta) / delta) ** 2))
