"""Step-wise perturbations that degrade a faithful drawing."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Iterator

import numpy as np

from .const import (
    DEFAULT_EDGE_SUBSET_FRACTION,
    DEFAULT_STRETCH_FACTOR,
    MAX_DEFORM_FRACTION,
    MIN_DEFORM_FRACTION,
)
from .exceptions import DegenerateDrawingError, InvalidEdgeSetError
from .graph import Drawing, Edge, TimeSlice, bounding_box_size, normalize_edge
from .seeding import derive_seed

_LOGGER = logging.getLogger(__name__)

# Sub-seed keys under derive_seed(seed, step, key)
_KEY_DISPLACEMENT = 0
_KEY_FRACTION = 1
_KEY_EDGE_SPLIT = 2


def deformation_fraction(seed: int) -> float:
    """Draw the drawing-area multiplier for one step, uniform in [0.05, 0.1]."""
    rng = np.random.default_rng(seed)
    return float(rng.uniform(MIN_DEFORM_FRACTION, MAX_DEFORM_FRACTION))


def deform_cluster_step(drawing: Drawing, seed: int, fraction: float) -> Drawing:
    """Displace every vertex by up to δ = bounding box size × fraction.

    Each displacement has a magnitude uniform in [0, δ] and a uniformly
    random direction.
    """
    if not 0.0 <= fraction <= 1.0 or not math.isfinite(fraction):
        raise ValueError(f"fraction must lie in [0, 1], got {fraction}")
    try:
        delta = bounding_box_size(drawing) * fraction
    except DegenerateDrawingError:
        delta = 0.0
    if delta == 0.0:
        return drawing
    rng = np.random.default_rng(seed)
    n = drawing.vertex_count
    magnitude = rng.uniform(0.0, delta, size=n)
    angle = rng.uniform(0.0, 2.0 * np.pi, size=n)
    offset = np.column_stack([magnitude * np.cos(angle), magnitude * np.sin(angle)])
    return Drawing(drawing.positions + offset)


def split_edges(slice_: TimeSlice, seed: int) -> tuple[frozenset[Edge], frozenset[Edge]]:
    """Split a slice's edges at random into a stretch half and a shrink half."""
    edges = [tuple(edge) for edge in slice_.edge_array.tolist()]
    order = np.random.default_rng(seed).permutation(len(edges))
    half = len(edges) // 2
    stretch = frozenset(edges[i] for i in order[:half])
    shrink = frozenset(edges[i] for i in order[half:])
    return stretch, shrink  # type: ignore[return-value]


def _validate_edge_set(slice_: TimeSlice, edges: Iterable[Edge], name: str) -> list[Edge]:
    normalized = sorted({normalize_edge(u, v) for u, v in edges})
    missing = [edge for edge in normalized if edge not in slice_.edges]
    if missing:
        raise InvalidEdgeSetError(f"{name} contains non-edges: {missing[:5]}")
    return normalized


def deform_distance_step(
    drawing: Drawing,
    slice_: TimeSlice,
    stretch_set: Iterable[Edge],
    shrink_set: Iterable[Edge],
    seed: int,
    factor: float = DEFAULT_STRETCH_FACTOR,
    subset_fraction: float = DEFAULT_EDGE_SUBSET_FRACTION,
) -> Drawing:
    """Lengthen stretch edges by ``factor`` and shorten shrink edges by 1/``factor``.

    For each selected edge the lower-degree endpoint (lower index on ties)
    moves along the edge, so that edge's drawn length changes by exactly the
    factor. ``subset_fraction`` of each set is selected at random each step.
    """
    if not factor > 1.0:
        raise ValueError(f"factor must exceed 1, got {factor}")
    if not 0.0 <= subset_fraction <= 1.0:
        raise ValueError(f"subset_fraction must lie in [0, 1], got {subset_fraction}")
    if drawing.vertex_count != slice_.vertex_count:
        raise InvalidEdgeSetError(
            f"Drawing has {drawing.vertex_count} points for "
            f"{slice_.vertex_count} vertices"
        )
    stretch = _validate_edge_set(slice_, stretch_set, "stretch_set")
    shrink = _validate_edge_set(slice_, shrink_set, "shrink_set")
    overlap = set(stretch) & set(shrink)
    if overlap:
        raise InvalidEdgeSetError(f"Edge sets overlap on {sorted(overlap)[:5]}")

    rng = np.random.default_rng(seed)
    degrees = slice_.degrees
    positions = drawing.positions.copy()
    for edges, scale in ((stretch, factor), (shrink, 1.0 / factor)):
        if not edges:
            continue
        count = int(round(subset_fraction * len(edges)))
        chosen = np.sort(rng.choice(len(edges), size=count, replace=False))
        for index in chosen:
            u, v = edges[index]
            moved, anchor = (u, v) if degrees[u] <= degrees[v] else (v, u)
            positions[moved] = positions[anchor] + scale * (
                positions[moved] - positions[anchor]
            )
    _LOGGER.debug(
        "Deformed %s stretch and %s shrink edges by %s", len(stretch), len(shrink), factor
    )
    return Drawing(positions)


def cluster_deformation_steps(
    drawing: Drawing, steps: int, seed: int
) -> Iterator[Drawing]:
    """Yield the drawing after each of ``steps`` cumulative cluster deformations."""
    for step in range(1, steps + 1):
        fraction = deformation_fraction(derive_seed(seed, step, _KEY_FRACTION))
        drawing = deform_cluster_step(
            drawing, derive_seed(seed, step, _KEY_DISPLACEMENT), fraction
        )
        yield drawing


def distance_deformation_steps(
    drawing: Drawing,
    slice_: TimeSlice,
    steps: int,
    seed: int,
    factor: float = DEFAULT_STRETCH_FACTOR,
    subset_fraction: float = DEFAULT_EDGE_SUBSET_FRACTION,
) -> Iterator[Drawing]:
    """Yield the drawing after each of ``steps`` cumulative stretch/shrink steps.

    The stretch and shrink halves are drawn once and kept for every step.
    """
    stretch, shrink = split_edges(slice_, derive_seed(seed, 0, _KEY_EDGE_SPLIT))
    for step in range(1, steps + 1):
        drawing = deform_distance_step(
            drawing,
            slice_,
            stretch,
            shrink,
            derive_seed(seed, step, _KEY_DISPLACEMENT),
            factor=factor,
            subset_fraction=subset_fraction,
        )
        yield drawing
