"""Tests for the experiment pipelines."""

from __future__ import annotations

from pathlib import Path

import pytest

from change_faithfulness.const import (
    METRIC_CCQ_ARI,
    METRIC_CCQ_FMI,
    METRIC_CQ_ARI_1,
    METRIC_CQ_ARI_2,
    METRIC_CQ_FMI_1,
    METRIC_DCQ1,
    METRIC_DCQ2,
    METRIC_STRESS_1,
)
from change_faithfulness.exceptions import (
    InvalidGraphError,
    InvalidSpecError,
    MissingCoordinatesError,
)
from change_faithfulness.experiments import (
    DatasetTrace,
    ExperimentConfig,
    ExperimentCoordinator,
    ExperimentTrace,
    ImportedLayout,
    MetricReport,
    TrendStatistic,
    run_dcq_validation,
    run_layout_comparison,
    trend_summary,
)
from change_faithfulness.generators import Dataset, DistanceGenSpec, gen_distance_pair
from change_faithfulness.layouts import layout_fr
from change_faithfulness.storage import save_coordinates


def _trace(dataset_id: str, values: list[float], layout: str | None = None) -> DatasetTrace:
    return DatasetTrace(
        dataset_id=dataset_id,
        steps=[MetricReport({METRIC_DCQ1: value}) for value in values],
        layout=layout,
    )


@pytest.fixture
def second_distance_dataset() -> Dataset:
    """Return another small distance dataset."""
    spec = DistanceGenSpec(vertex_count=24, backbone="path", shortcut_count=2, seed=8)
    return Dataset(dataset_id="distance_01", pair=gen_distance_pair(spec))


class TestExperimentConfig:
    """Tests for experiment options."""

    def test_defaults(self) -> None:
        """Test the default options."""
        config = ExperimentConfig.from_options()

        assert config == ExperimentConfig()
        assert config.steps == 10
        assert config.workers == 1
        assert config.factor == 1.15
        assert config.subset_fraction == 1.0
        assert config.change_measure == "similarity"

    def test_coercion(self) -> None:
        """Test that numeric strings are accepted."""
        config = ExperimentConfig.from_options({"steps": "4", "seed": "7"})

        assert config.steps == 4
        assert config.seed == 7

    @pytest.mark.parametrize(
        "options",
        [
            {"steps": -1},
            {"steps": 101},
            {"workers": 0},
            {"seed": -3},
            {"factor": 1.0},
            {"subset_fraction": 1.5},
            {"change_measure": "distance"},
            {"colour": "red"},
        ],
    )
    def test_invalid(self, options: dict) -> None:
        """Test that invalid options are rejected."""
        with pytest.raises(InvalidSpecError):
            ExperimentConfig.from_options(options)


class TestTraces:
    """Tests for metric reports and traces."""

    def test_report_rejects_unknown_metric(self) -> None:
        """Test that metric names are checked."""
        with pytest.raises(ValueError, match="Unknown metric"):
            MetricReport({"speed": 1.0})

    def test_report_rejects_nan(self) -> None:
        """Test that metric values must be finite."""
        with pytest.raises(ValueError, match="not finite"):
            MetricReport({METRIC_DCQ1: float("nan")})

    def test_dataset_trace_needs_steps(self) -> None:
        """Test that a trace has at least one step."""
        with pytest.raises(ValueError):
            DatasetTrace(dataset_id="a", steps=[])

    def test_dataset_trace_mixed_metrics(self) -> None:
        """Test that every step reports the same metrics."""
        with pytest.raises(ValueError, match="mixes"):
            DatasetTrace(
                dataset_id="a",
                steps=[MetricReport({METRIC_DCQ1: 1.0}), MetricReport({METRIC_DCQ2: 1.0})],
            )

    def test_label_and_group(self) -> None:
        """Test labels and groups with and without a layout."""
        plain = _trace("a", [1.0])
        named = _trace("a", [1.0], layout="fr")

        assert (plain.label, plain.group) == ("a", "all")
        assert (named.label, named.group) == ("a@fr", "fr")

    def test_group_must_be_rectangular(self) -> None:
        """Test that traces of one group share their step count."""
        with pytest.raises(ValueError):
            ExperimentTrace(experiment="x", datasets=[_trace("a", [1.0]), _trace("b", [1.0, 0.5])])

    def test_aggregate(self) -> None:
        """Test the mean and deviation per step."""
        trace = ExperimentTrace(
            experiment="x", datasets=[_trace("a", [1.0, 0.8]), _trace("b", [1.0, 0.4])]
        )

        assert trace.aggregate() == {"all": {METRIC_DCQ1: [1.0, pytest.approx(0.6)]}}
        assert trace.aggregate_std()["all"][METRIC_DCQ1] == [0.0, pytest.approx(0.2)]
        assert trace.metric_names == (METRIC_DCQ1,)

    def test_groups_keep_order(self) -> None:
        """Test groups appear in first-appearance order."""
        trace = ExperimentTrace(
            experiment="x",
            datasets=[_trace("a", [0.5], "stressmaj"), _trace("a", [0.3], "fr")],
        )

        assert list(trace.groups()) == ["stressmaj", "fr"]

    def test_empty(self) -> None:
        """Test an experiment without datasets."""
        trace = ExperimentTrace(experiment="x")

        assert trace.is_empty
        assert trace.metric_names == ()


class TestTrendSummary:
    """Tests for trend statistics."""

    def test_decreasing(self) -> None:
        """Test a strictly decreasing mean."""
        trace = ExperimentTrace(experiment="x", datasets=[_trace("a", [1.0, 0.9, 0.7, 0.6])])

        statistic = trend_summary(trace)[METRIC_DCQ1]

        assert statistic.spearman == pytest.approx(-1.0)
        assert statistic.drop == pytest.approx(0.4)

    def test_constant(self) -> None:
        """Test that a flat series has no correlation."""
        trace = ExperimentTrace(experiment="x", datasets=[_trace("a", [1.0, 1.0, 1.0])])

        assert trend_summary(trace)[METRIC_DCQ1] == TrendStatistic(0.0, 1.0, 1.0)

    def test_single_step(self) -> None:
        """Test that one step has no correlation."""
        trace = ExperimentTrace(experiment="x", datasets=[_trace("a", [0.7], "fr")])

        assert trend_summary(trace, "fr")[METRIC_DCQ1].spearman == 0.0


class TestCoordinator:
    """Tests for ExperimentCoordinator."""

    async def test_ccq_validation(self, cluster_dataset: Dataset) -> None:
        """Test the cluster change validation starts faithful."""
        coordinator = ExperimentCoordinator(ExperimentConfig(steps=3, seed=2))

        trace = await coordinator.async_run_ccq_validation([cluster_dataset])

        assert trace.experiment == "ccq-val"
        (dataset,) = trace.datasets
        assert len(dataset.steps) == 4
        first = dataset.steps[0]
        assert first[METRIC_CQ_ARI_1] == first[METRIC_CQ_ARI_2] == 1.0
        assert first[METRIC_CQ_FMI_1] == 1.0
        assert first[METRIC_CCQ_ARI] == first[METRIC_CCQ_FMI] == 1.0
        assert all(0.0 <= report[METRIC_CCQ_ARI] <= 1.0 for report in dataset.steps)

    async def test_ccq_validation_dissimilarity(self, cluster_dataset: Dataset) -> None:
        """Test the dissimilarity change measure also starts faithful."""
        config = ExperimentConfig.from_options({"steps": 2, "change_measure": "dissimilarity"})
        coordinator = ExperimentCoordinator(config)

        trace = await coordinator.async_run_ccq_validation([cluster_dataset])

        first = trace.datasets[0].steps[0]
        assert first[METRIC_CCQ_ARI] == first[METRIC_CCQ_FMI] == 1.0

    async def test_ccq_validation_needs_clusterings(
        self, distance_dataset: Dataset
    ) -> None:
        """Test that the cluster validation needs ground truth."""
        coordinator = ExperimentCoordinator(ExperimentConfig(steps=1))

        with pytest.raises(InvalidGraphError):
            await coordinator.async_run_ccq_validation([distance_dataset])

    async def test_dcq_validation(self, distance_dataset: Dataset) -> None:
        """Test the distance change validation records every step."""
        coordinator = ExperimentCoordinator(ExperimentConfig(steps=2))

        trace = await coordinator.async_run_dcq_validation([distance_dataset])

        assert trace.experiment == "dcq-val"
        (dataset,) = trace.datasets
        assert len(dataset.steps) == 3
        assert all(report[METRIC_DCQ1] <= 1.0 for report in dataset.steps)
        assert all(report[METRIC_DCQ2] <= 1.0 for report in dataset.steps)
        assert len({report[METRIC_STRESS_1] for report in dataset.steps}) == 1

    async def test_listeners(self, distance_dataset: Dataset) -> None:
        """Test progress callbacks and their removal."""
        coordinator = ExperimentCoordinator(ExperimentConfig(steps=0))
        calls: list[tuple[str, int, int]] = []
        remove = coordinator.add_listener(lambda *args: calls.append(args))

        await coordinator.async_run_dcq_validation([distance_dataset])
        remove()
        await coordinator.async_run_dcq_validation([distance_dataset])

        assert calls == [("distance_00", 1, 1)]

    def test_worker_count_does_not_change_results(
        self, distance_dataset: Dataset, second_distance_dataset: Dataset
    ) -> None:
        """Test that results are identical for one and several workers."""
        datasets = [distance_dataset, second_distance_dataset]

        serial = run_dcq_validation(datasets, steps=2, seed=5, workers=1)
        parallel = run_dcq_validation(datasets, steps=2, seed=5, workers=2)

        assert [trace.dataset_id for trace in parallel.datasets] == [
            "distance_00",
            "distance_01",
        ]
        for a, b in zip(serial.datasets, parallel.datasets, strict=True):
            assert [dict(report.values) for report in a.steps] == [
                dict(report.values) for report in b.steps
            ]


class TestLayoutComparison:
    """Tests for layout comparison."""

    def test_builtin_layouts(self, distance_dataset: Dataset) -> None:
        """Test one single-step trace per layout."""
        trace = run_layout_comparison([distance_dataset], ["stressmaj", "fr"], "distance")

        assert trace.experiment == "dcq-cmp"
        assert [dataset.label for dataset in trace.datasets] == [
            "distance_00@stressmaj",
            "distance_00@fr",
        ]
        assert all(len(dataset.steps) == 1 for dataset in trace.datasets)
        assert METRIC_STRESS_1 in trace.metric_names

    def test_cluster_kind(self, cluster_dataset: Dataset) -> None:
        """Test the cluster faithful layout scores perfectly on CQ."""
        trace = run_layout_comparison([cluster_dataset], ["clusterfaithful"], "cluster")

        (dataset,) = trace.datasets
        assert trace.experiment == "ccq-cmp"
        assert dataset.steps[0][METRIC_CQ_ARI_1] == 1.0
        assert dataset.steps[0][METRIC_CQ_ARI_2] == 1.0

    def test_imported_layout(self, tmp_path: Path, distance_dataset: Dataset) -> None:
        """Test drawings imported from coordinate files."""
        pair = distance_dataset.pair
        save_coordinates(layout_fr(pair.slice1, 1), tmp_path / "distance_00_1.txt")
        save_coordinates(layout_fr(pair.slice2, 1), tmp_path / "distance_00_2.txt")

        trace = run_layout_comparison(
            [distance_dataset], [ImportedLayout("tool", tmp_path)], "distance"
        )

        assert [dataset.label for dataset in trace.datasets] == ["distance_00@tool"]

    def test_imported_layout_missing_file(
        self, tmp_path: Path, distance_dataset: Dataset
    ) -> None:
        """Test that absent coordinate files are reported."""
        with pytest.raises(MissingCoordinatesError):
            run_layout_comparison(
                [distance_dataset], [ImportedLayout("tool", tmp_path)], "distance"
            )

    @pytest.mark.parametrize(
        ("layouts", "kind"),
        [
            (["stressmaj"], "timeline"),
            ([], "distance"),
            (["tsnet"], "distance"),
            (["fr", "fr"], "distance"),
        ],
    )
    def test_invalid_request(
        self, distance_dataset: Dataset, layouts: list[str], kind: str
    ) -> None:
        """Test kind and layout validation."""
        with pytest.raises(InvalidSpecError):
            run_layout_comparison([distance_dataset], layouts, kind)
