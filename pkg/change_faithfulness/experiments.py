"""Validation and layout comparison pipelines."""

from __future__ import annotations

import asyncio
import itertools
import logging
import math
from collections.abc import Callable, Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Any

import numpy as np
import voluptuous as vol
from scipy.stats import spearmanr

from .clustering import ClusteringIndex, compare, geometric_clustering
from .const import (
    CHANGE_DISSIMILARITY,
    CHANGE_SIMILARITY,
    CONF_CHANGE_MEASURE,
    CONF_FACTOR,
    CONF_SEED,
    CONF_STEPS,
    CONF_SUBSET_FRACTION,
    CONF_WORKERS,
    DEFAULT_CHANGE_MEASURE,
    DEFAULT_EDGE_SUBSET_FRACTION,
    DEFAULT_SEED,
    DEFAULT_STEPS,
    DEFAULT_STRETCH_FACTOR,
    DEFAULT_WORKERS,
    EXPERIMENT_CCQ_COMPARISON,
    EXPERIMENT_CCQ_VALIDATION,
    EXPERIMENT_DCQ_COMPARISON,
    EXPERIMENT_DCQ_VALIDATION,
    KIND_CLUSTER,
    KIND_DISTANCE,
    LAYOUT_CLUSTER_FAITHFUL,
    LAYOUT_SEPARATOR,
    MAX_STEPS,
    MAX_WORKERS,
    METRIC_CCQ_ARI,
    METRIC_CCQ_FMI,
    METRIC_CQ_ARI_1,
    METRIC_CQ_ARI_2,
    METRIC_CQ_FMI_1,
    METRIC_CQ_FMI_2,
    METRIC_DCQ1,
    METRIC_DCQ2,
    METRIC_NAMES,
    METRIC_STRESS_1,
    METRIC_STRESS_2,
)
from .deformation import cluster_deformation_steps, distance_deformation_steps
from .exceptions import (
    InvalidGraphError,
    InvalidSpecError,
    LayoutNotFaithfulError,
    MissingCoordinatesError,
)
from .generators import Dataset
from .graph import (
    Clustering,
    DistanceMatrix,
    Drawing,
    DynamicPair,
    all_pairs_geometric_distance,
    all_pairs_graph_distance,
    average_edge_length,
)
from .layouts import BUILTIN_LAYOUTS, cluster_faithful_layout, layout_stress_majorization
from .metrics import (
    ChangeMeasure,
    ClusterChangeInput,
    DistanceChangeInput,
    ccq,
    dcq1,
    dcq2,
    stress_from_distances,
)
from .seeding import derive_seed
from .storage import load_coordinates

_LOGGER = logging.getLogger(__name__)

GROUP_ALL = "all"

# Sub-seed purposes under derive_seed(seed, dataset_index, purpose, ...)
_PURPOSE_LAYOUT = 0
_PURPOSE_CLUSTERING = 1
_PURPOSE_DEFORM = 2

EXPERIMENT_OPTIONS_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_STEPS, default=DEFAULT_STEPS): vol.All(
            vol.Coerce(int), vol.Range(min=0, max=MAX_STEPS)
        ),
        vol.Optional(CONF_WORKERS, default=DEFAULT_WORKERS): vol.All(
            vol.Coerce(int), vol.Range(min=1, max=MAX_WORKERS)
        ),
        vol.Optional(CONF_SEED, default=DEFAULT_SEED): vol.All(
            vol.Coerce(int), vol.Range(min=0)
        ),
        vol.Optional(CONF_FACTOR, default=DEFAULT_STRETCH_FACTOR): vol.All(
            vol.Coerce(float), vol.Range(min=1.0, min_included=False)
        ),
        vol.Optional(CONF_SUBSET_FRACTION, default=DEFAULT_EDGE_SUBSET_FRACTION): vol.All(
            vol.Coerce(float), vol.Range(min=0.0, max=1.0)
        ),
        vol.Optional(CONF_CHANGE_MEASURE, default=DEFAULT_CHANGE_MEASURE): vol.In(
            [CHANGE_SIMILARITY, CHANGE_DISSIMILARITY]
        ),
    }
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Options shared by every pipeline."""

    steps: int = DEFAULT_STEPS
    workers: int = DEFAULT_WORKERS
    seed: int = DEFAULT_SEED
    factor: float = DEFAULT_STRETCH_FACTOR
    subset_fraction: float = DEFAULT_EDGE_SUBSET_FRACTION
    change_measure: str = DEFAULT_CHANGE_MEASURE

    @classmethod
    def from_options(cls, options: Mapping[str, Any] | None = None) -> ExperimentConfig:
        """Validate a plain option mapping and fill in defaults."""
        try:
            data = EXPERIMENT_OPTIONS_SCHEMA(dict(options or {}))
        except vol.Invalid as err:
            raise InvalidSpecError(f"Invalid experiment options: {err}") from err
        return cls(**data)


@dataclass(frozen=True)
class MetricReport:
    """Named metric values for one drawing pair."""

    values: Mapping[str, float]

    def __post_init__(self) -> None:
        """Validate names and values."""
        for name, value in self.values.items():
            if name not in METRIC_NAMES:
                raise ValueError(f"Unknown metric {name!r}")
            if not math.isfinite(value):
                raise ValueError(f"Metric {name} is not finite: {value}")

    @property
    def names(self) -> frozenset[str]:
        """Return the populated metric names."""
        return frozenset(self.values)

    def __getitem__(self, name: str) -> float:
        """Return one metric value."""
        return self.values[name]


@dataclass
class DatasetTrace:
    """Metric reports of one dataset, indexed by deformation step."""

    dataset_id: str
    steps: list[MetricReport]
    layout: str | None = None

    def __post_init__(self) -> None:
        """Validate the step sequence."""
        if not self.steps:
            raise ValueError(f"Trace of {self.dataset_id} has no steps")
        names = self.steps[0].names
        if any(report.names != names for report in self.steps):
            raise ValueError(f"Trace of {self.dataset_id} mixes metric sets")

    @property
    def label(self) -> str:
        """Return the dataset label used in result files."""
        if self.layout is None:
            return self.dataset_id
        return f"{self.dataset_id}{LAYOUT_SEPARATOR}{self.layout}"

    @property
    def group(self) -> str:
        """Return the aggregation group."""
        return self.layout or GROUP_ALL

    def series(self, metric: str) -> list[float]:
        """Return one metric over all steps."""
        return [report[metric] for report in self.steps]


@dataclass
class ExperimentTrace:
    """Per-step metrics of every dataset of one experiment."""

    experiment: str
    datasets: list[DatasetTrace] = field(default_factory=list)

    def __post_init__(self) -> None:
        """Check that every group is rectangular."""
        for group, traces in self.groups().items():
            shapes = {(len(trace.steps), trace.steps[0].names) for trace in traces}
            if len(shapes) > 1:
                raise ValueError(f"Group {group} mixes step counts or metric sets")

    @property
    def is_empty(self) -> bool:
        """Return True if no dataset was traced."""
        return not self.datasets

    @property
    def metric_names(self) -> tuple[str, ...]:
        """Return the populated metric names in canonical order."""
        present = set().union(*(trace.steps[0].names for trace in self.datasets))
        return tuple(name for name in METRIC_NAMES if name in present)

    def groups(self) -> dict[str, list[DatasetTrace]]:
        """Return dataset traces by group, in first-appearance order."""
        grouped: dict[str, list[DatasetTrace]] = {}
        for trace in self.datasets:
            grouped.setdefault(trace.group, []).append(trace)
        return grouped

    def _reduce(
        self, reducer: Callable[[np.ndarray], float]
    ) -> dict[str, dict[str, list[float]]]:
        result: dict[str, dict[str, list[float]]] = {}
        for group, traces in self.groups().items():
            result[group] = {}
            for metric in sorted(traces[0].steps[0].names, key=METRIC_NAMES.index):
                table = np.array([trace.series(metric) for trace in traces])
                result[group][metric] = [reducer(column) for column in table.T]
        return result

    def aggregate(self) -> dict[str, dict[str, list[float]]]:
        """Return the mean of each metric at each step, per group."""
        return self._reduce(lambda column: float(np.mean(column)))

    def aggregate_std(self) -> dict[str, dict[str, list[float]]]:
        """Return the population standard deviation of each metric at each step."""
        return self._reduce(lambda column: float(np.std(column)))


@dataclass(frozen=True)
class TrendStatistic:
    """How an aggregate metric moves across steps."""

    spearman: float
    first: float
    last: float

    @property
    def drop(self) -> float:
        """Return the decrease from the first to the last step."""
        return self.first - self.last


def trend_summary(
    trace: ExperimentTrace, group: str = GROUP_ALL
) -> dict[str, TrendStatistic]:
    """Return the rank correlation of step index and mean value, per metric.

    A series with fewer than two steps, or a constant one, has correlation 0.
    """
    summary: dict[str, TrendStatistic] = {}
    for metric, means in trace.aggregate()[group].items():
        rho = 0.0
        if len(means) > 1 and len(set(means)) > 1:
            correlation, _ = spearmanr(np.arange(len(means)), means)
            rho = float(correlation)
            if not math.isfinite(rho):
                rho = 0.0
        summary[metric] = TrendStatistic(spearman=rho, first=means[0], last=means[-1])
    return summary


@dataclass(frozen=True)
class ImportedLayout:
    """Drawings produced by an external tool, one coordinate file per slice.

    ``directory`` holds ``<dataset_id>_1.txt`` and ``<dataset_id>_2.txt``.
    """

    name: str
    directory: Path

    def drawings(self, dataset: Dataset) -> tuple[Drawing, Drawing]:
        """Load both drawings of a dataset."""
        n = dataset.pair.vertex_count
        drawings = []
        for position in (1, 2):
            path = Path(self.directory) / f"{dataset.dataset_id}_{position}.txt"
            if not path.is_file():
                raise MissingCoordinatesError(
                    f"Layout {self.name} has no coordinates at {path}"
                )
            drawings.append(load_coordinates(path, n))
        return drawings[0], drawings[1]


LayoutSource = str | ImportedLayout


def _cluster_report(
    pair: DynamicPair,
    geometric1: Clustering,
    geometric2: Clustering,
    measure: ChangeMeasure | str,
) -> MetricReport:
    """Return CQ of both drawings and CCQ of the pair under ARI and FMI."""
    assert pair.clustering1 is not None and pair.clustering2 is not None
    values: dict[str, float] = {}
    for index, cq_1, cq_2, ccq_name in (
        (ClusteringIndex.ARI, METRIC_CQ_ARI_1, METRIC_CQ_ARI_2, METRIC_CCQ_ARI),
        (ClusteringIndex.FMI, METRIC_CQ_FMI_1, METRIC_CQ_FMI_2, METRIC_CCQ_FMI),
    ):
        values[cq_1] = compare(pair.clustering1, geometric1, index)
        values[cq_2] = compare(pair.clustering2, geometric2, index)
        change = ClusterChangeInput.from_clusterings(
            (pair.clustering1, pair.clustering2), (geometric1, geometric2), index, measure
        )
        values[ccq_name] = ccq(change)
    return MetricReport(values)


@dataclass(frozen=True, eq=False)
class _GraphDistances:
    """Graph distances of both slices, computed once per dataset."""

    graph1: DistanceMatrix
    graph2: DistanceMatrix

    @classmethod
    def of(cls, pair: DynamicPair) -> _GraphDistances:
        return cls(
            graph1=all_pairs_graph_distance(pair.slice1),
            graph2=all_pairs_graph_distance(pair.slice2),
        )

    def report(self, pair: DynamicPair, drawing1: Drawing, drawing2: Drawing) -> MetricReport:
        """Return DCQ1, DCQ2 and both stress values for a drawing pair."""
        geo1 = all_pairs_geometric_distance(drawing1)
        geo2 = all_pairs_geometric_distance(drawing2)
        change = DistanceChangeInput(
            graph_dist1=self.graph1,
            graph_dist2=self.graph2,
            geo_dist1=geo1,
            geo_dist2=geo2,
            tl=average_edge_length((drawing1, drawing2), pair),
        )
        diam1 = int(round(self.graph1.max()))
        diam2 = int(round(self.graph2.max()))
        return MetricReport(
            {
                METRIC_DCQ1: dcq1(change),
                METRIC_DCQ2: dcq2(change, diam1, diam2),
                METRIC_STRESS_1: stress_from_distances(self.graph1, geo1),
                METRIC_STRESS_2: stress_from_distances(self.graph2, geo2),
            }
        )


def _require_clusterings(dataset: Dataset) -> tuple[Clustering, Clustering]:
    pair = dataset.pair
    if pair.clustering1 is None or pair.clustering2 is None:
        raise InvalidGraphError(f"Dataset {dataset.dataset_id} has no clusterings")
    return pair.clustering1, pair.clustering2


def _ccq_validation_trace(
    config: ExperimentConfig, index: int, dataset: Dataset
) -> DatasetTrace:
    """Deform the second cluster faithful drawing step by step and track CCQ."""
    clustering1, clustering2 = _require_clusterings(dataset)
    pair = dataset.pair
    cluster_seed = derive_seed(config.seed, index, _PURPOSE_CLUSTERING)
    drawing1, drawing2 = cluster_faithful_layout(
        pair,
        derive_seed(config.seed, index, _PURPOSE_LAYOUT),
        clustering_seed=cluster_seed,
    )
    geometric1 = geometric_clustering(drawing1, clustering1.cluster_count, cluster_seed)
    schedule = itertools.chain(
        [drawing2],
        cluster_deformation_steps(
            drawing2, config.steps, derive_seed(config.seed, index, _PURPOSE_DEFORM)
        ),
    )
    reports = []
    for step, deformed in enumerate(schedule):
        geometric2 = geometric_clustering(
            deformed, clustering2.cluster_count, cluster_seed
        )
        report = _cluster_report(pair, geometric1, geometric2, config.change_measure)
        if step == 0 and (report[METRIC_CQ_ARI_1] != 1.0 or report[METRIC_CQ_ARI_2] != 1.0):
            raise LayoutNotFaithfulError(
                f"Initial drawings of {dataset.dataset_id} are not cluster faithful"
            )
        _LOGGER.debug(
            "%s step %s: CCQ_ARI %s, CCQ_FMI %s",
            dataset.dataset_id,
            step,
            report[METRIC_CCQ_ARI],
            report[METRIC_CCQ_FMI],
        )
        reports.append(report)
    return DatasetTrace(dataset_id=dataset.dataset_id, steps=reports)


def _dcq_validation_trace(
    config: ExperimentConfig, index: int, dataset: Dataset
) -> DatasetTrace:
    """Stretch and shrink edges of the second stress drawing and track DCQ."""
    pair = dataset.pair
    distances = _GraphDistances.of(pair)
    layout_seed = derive_seed(config.seed, index, _PURPOSE_LAYOUT)
    drawing1 = layout_stress_majorization(pair.slice1, layout_seed)
    drawing2 = layout_stress_majorization(pair.slice2, layout_seed)
    schedule = itertools.chain(
        [drawing2],
        distance_deformation_steps(
            drawing2,
            pair.slice2,
            config.steps,
            derive_seed(config.seed, index, _PURPOSE_DEFORM),
            factor=config.factor,
            subset_fraction=config.subset_fraction,
        ),
    )
    reports = []
    for step, deformed in enumerate(schedule):
        report = distances.report(pair, drawing1, deformed)
        _LOGGER.debug(
            "%s step %s: DCQ1 %s, DCQ2 %s",
            dataset.dataset_id,
            step,
            report[METRIC_DCQ1],
            report[METRIC_DCQ2],
        )
        reports.append(report)
    return DatasetTrace(dataset_id=dataset.dataset_id, steps=reports)


def _layout_name(layout: LayoutSource) -> str:
    return layout.name if isinstance(layout, ImportedLayout) else layout


def _comparison_drawings(
    layout: LayoutSource, dataset: Dataset, layout_seed: int, cluster_seed: int
) -> tuple[Drawing, Drawing]:
    if isinstance(layout, ImportedLayout):
        return layout.drawings(dataset)
    if layout == LAYOUT_CLUSTER_FAITHFUL:
        return cluster_faithful_layout(
            dataset.pair, layout_seed, clustering_seed=cluster_seed
        )
    return BUILTIN_LAYOUTS[layout](dataset.pair, layout_seed)


def _comparison_traces(
    config: ExperimentConfig,
    layouts: Sequence[LayoutSource],
    kind: str,
    index: int,
    dataset: Dataset,
) -> list[DatasetTrace]:
    """Score every layout on one dataset."""
    layout_seed = derive_seed(config.seed, index, _PURPOSE_LAYOUT)
    cluster_seed = derive_seed(config.seed, index, _PURPOSE_CLUSTERING)
    distances = _GraphDistances.of(dataset.pair) if kind == KIND_DISTANCE else None
    traces = []
    for layout in layouts:
        drawing1, drawing2 = _comparison_drawings(layout, dataset, layout_seed, cluster_seed)
        if distances is not None:
            report = distances.report(dataset.pair, drawing1, drawing2)
        else:
            clustering1, clustering2 = _require_clusterings(dataset)
            report = _cluster_report(
                dataset.pair,
                geometric_clustering(drawing1, clustering1.cluster_count, cluster_seed),
                geometric_clustering(drawing2, clustering2.cluster_count, cluster_seed),
                config.change_measure,
            )
        traces.append(
            DatasetTrace(
                dataset_id=dataset.dataset_id, steps=[report], layout=_layout_name(layout)
            )
        )
    return traces


class ExperimentCoordinator:
    """Run a pipeline over many datasets on a bounded worker pool.

    Results are collected in dataset order, so the trace does not depend on
    the number of workers.
    """

    def __init__(self, config: ExperimentConfig | None = None) -> None:
        """Initialize the coordinator."""
        self.config = config or ExperimentConfig()
        self._listeners: list[Callable[[str, int, int], None]] = []

    def add_listener(
        self, update_callback: Callable[[str, int, int], None]
    ) -> Callable[[], None]:
        """Register a progress callback (dataset_id, done, total)."""
        self._listeners.append(update_callback)

        def remove_listener() -> None:
            if update_callback in self._listeners:
                self._listeners.remove(update_callback)

        return remove_listener

    def _notify(self, dataset_id: str, done: int, total: int) -> None:
        for listener in list(self._listeners):
            listener(dataset_id, done, total)

    async def _async_map(
        self,
        datasets: Sequence[Dataset],
        job: Callable[[int, Dataset], DatasetTrace | list[DatasetTrace]],
    ) -> list[DatasetTrace]:
        loop = asyncio.get_running_loop()
        total = len(datasets)
        done = 0

        with ThreadPoolExecutor(max_workers=self.config.workers) as executor:

            async def run_one(index: int, dataset: Dataset) -> DatasetTrace | list[DatasetTrace]:
                nonlocal done
                result = await loop.run_in_executor(executor, job, index, dataset)
                done += 1
                self._notify(dataset.dataset_id, done, total)
                return result

            results = await asyncio.gather(
                *(run_one(index, dataset) for index, dataset in enumerate(datasets))
            )

        traces: list[DatasetTrace] = []
        for result in results:
            traces.extend(result if isinstance(result, list) else [result])
        return traces

    async def async_run_ccq_validation(self, datasets: Sequence[Dataset]) -> ExperimentTrace:
        """Run the cluster change validation on every dataset."""
        _LOGGER.info(
            "CCQ validation on %s datasets, %s steps", len(datasets), self.config.steps
        )
        traces = await self._async_map(datasets, partial(_ccq_validation_trace, self.config))
        return ExperimentTrace(experiment=EXPERIMENT_CCQ_VALIDATION, datasets=traces)

    async def async_run_dcq_validation(self, datasets: Sequence[Dataset]) -> ExperimentTrace:
        """Run the distance change validation on every dataset."""
        _LOGGER.info(
            "DCQ validation on %s datasets, %s steps", len(datasets), self.config.steps
        )
        traces = await self._async_map(datasets, partial(_dcq_validation_trace, self.config))
        return ExperimentTrace(experiment=EXPERIMENT_DCQ_VALIDATION, datasets=traces)

    async def async_run_layout_comparison(
        self,
        datasets: Sequence[Dataset],
        layouts: Iterable[LayoutSource],
        kind: str,
    ) -> ExperimentTrace:
        """Score built-in and imported layouts on every dataset."""
        sources = list(layouts)
        if kind not in (KIND_CLUSTER, KIND_DISTANCE):
            raise InvalidSpecError(f"Unknown comparison kind {kind!r}")
        if not sources:
            raise InvalidSpecError("Layout comparison needs at least one layout")
        for layout in sources:
            if not isinstance(layout, ImportedLayout) and layout not in BUILTIN_LAYOUTS:
                raise InvalidSpecError(f"Unknown layout {layout!r}")
        names = [_layout_name(layout) for layout in sources]
        if len(set(names)) != len(names):
            raise InvalidSpecError(f"Duplicate layout names in {names}")
        _LOGGER.info(
            "Comparing layouts %s on %s %s datasets", ", ".join(names), len(datasets), kind
        )
        traces = await self._async_map(
            datasets, partial(_comparison_traces, self.config, sources, kind)
        )
        experiment = (
            EXPERIMENT_CCQ_COMPARISON if kind == KIND_CLUSTER else EXPERIMENT_DCQ_COMPARISON
        )
        return ExperimentTrace(experiment=experiment, datasets=traces)


def run_ccq_validation(
    datasets: Sequence[Dataset],
    steps: int = DEFAULT_STEPS,
    seed: int = DEFAULT_SEED,
    *,
    workers: int = DEFAULT_WORKERS,
    change_measure: str = DEFAULT_CHANGE_MEASURE,
) -> ExperimentTrace:
    """Run the cluster change validation synchronously."""
    config = ExperimentConfig.from_options(
        {
            CONF_STEPS: steps,
            CONF_SEED: seed,
            CONF_WORKERS: workers,
            CONF_CHANGE_MEASURE: change_measure,
        }
    )
    coordinator = ExperimentCoordinator(config)
    return asyncio.run(coordinator.async_run_ccq_validation(datasets))


def run_dcq_validation(
    datasets: Sequence[Dataset],
    steps: int = DEFAULT_STEPS,
    seed: int = DEFAULT_SEED,
    *,
    workers: int = DEFAULT_WORKERS,
    factor: float = DEFAULT_STRETCH_FACTOR,
    subset_fraction: float = DEFAULT_EDGE_SUBSET_FRACTION,
) -> ExperimentTrace:
    """Run the distance change validation synchronously."""
    config = ExperimentConfig.from_options(
        {
            CONF_STEPS: steps,
            CONF_SEED: seed,
            CONF_WORKERS: workers,
            CONF_FACTOR: factor,
            CONF_SUBSET_FRACTION: subset_fraction,
        }
    )
    return asyncio.run(ExperimentCoordinator(config).async_run_dcq_validation(datasets))


def run_layout_comparison(
    datasets: Sequence[Dataset],
    layouts: Iterable[LayoutSource],
    kind: str,
    seed: int = DEFAULT_SEED,
    *,
    workers: int = DEFAULT_WORKERS,
    change_measure: str = DEFAULT_CHANGE_MEASURE,
) -> ExperimentTrace:
    """Run a layout comparison synchronously."""
    config = ExperimentConfig.from_options(
        {CONF_SEED: seed, CONF_WORKERS: workers, CONF_CHANGE_MEASURE: change_measure}
    )
    coordinator = ExperimentCoordinator(config)
    return asyncio.run(coordinator.async_run_layout_comparison(datasets, layouts, kind))
