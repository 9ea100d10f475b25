"""Command line interface."""

from __future__ import annotations

import argparse
import asyncio
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, NoReturn

import voluptuous as vol

from .clustering import ClusteringIndex, cq, geometric_clustering
from .const import (
    BACKBONE_PATH,
    BACKBONE_TREE,
    CHANGE_DISSIMILARITY,
    CHANGE_SIMILARITY,
    CONF_CHANGE_MEASURE,
    CONF_FACTOR,
    CONF_SEED,
    CONF_STEPS,
    CONF_WORKERS,
    DEFAULT_CHANGE_MEASURE,
    DEFAULT_CLUSTER_SIZE_RANGE,
    DEFAULT_DATASET_COUNT,
    DEFAULT_SEED,
    DEFAULT_STEPS,
    DEFAULT_STRETCH_FACTOR,
    DEFAULT_WORKERS,
    EXIT_IO_ERROR,
    EXIT_OK,
    EXIT_VALIDATION_ERROR,
    EXPERIMENT_CCQ_COMPARISON,
    EXPERIMENT_CCQ_VALIDATION,
    EXPERIMENT_DCQ_COMPARISON,
    EXPERIMENT_DCQ_VALIDATION,
    INDEX_ARI,
    INDEX_FMI,
    KIND_CLUSTER,
    KIND_DISTANCE,
    LAYOUT_CLUSTER_FAITHFUL,
    LAYOUT_FR,
    LAYOUT_STRESS_MAJORIZATION,
    MAX_BASE_VERTEX_COUNT,
    MAX_DISTANCE_VERTICES,
    MAX_STEPS,
    MAX_WORKERS,
    MIN_DISTANCE_VERTICES,
    RESULTS_FILE,
    SUMMARY_FILE,
    TREND_FILE,
)
from .deformation import cluster_deformation_steps, distance_deformation_steps
from .exceptions import FaithfulnessError, InvalidGraphError, StorageError
from .experiments import (
    ExperimentConfig,
    ExperimentCoordinator,
    ExperimentTrace,
    ImportedLayout,
    LayoutSource,
    trend_summary,
)
from .generators import Dataset, generate_cluster_datasets, generate_distance_datasets
from .graph import DynamicPair, diameter
from .layouts import BUILTIN_LAYOUTS
from .metrics import (
    ClusterChangeInput,
    DistanceChangeInput,
    ccq,
    dcq1,
    dcq2,
    stress,
)
from .reporting import render_trend_svg, write_results_csv, write_summary_csv
from .storage import (
    load_coordinates,
    load_dataset,
    load_datasets,
    save_coordinates,
    save_dataset,
    save_datasets,
)

_LOGGER = logging.getLogger(__name__)

METRIC_CCQ = "ccq"
METRIC_DCQ1 = "dcq1"
METRIC_DCQ2 = "dcq2"
METRIC_CQ = "cq"
METRIC_STRESS = "stress"
PAIR_METRICS = (METRIC_CCQ, METRIC_DCQ1, METRIC_DCQ2)

DEFAULT_COMPARISON_LAYOUTS = {
    KIND_CLUSTER: (LAYOUT_CLUSTER_FAITHFUL, LAYOUT_STRESS_MAJORIZATION, LAYOUT_FR),
    KIND_DISTANCE: (LAYOUT_STRESS_MAJORIZATION, LAYOUT_FR),
}

_SEED = vol.All(vol.Coerce(int), vol.Range(min=0))
_POSITIVE = vol.All(vol.Coerce(int), vol.Range(min=1))
_DENSITY = vol.All(vol.Coerce(float), vol.Range(min=0.0, max=1.0, min_included=False))


def _optional(validator: Any) -> Any:
    return vol.Any(None, validator)


def _pair_metric_needs_second_drawing(options: dict[str, Any]) -> dict[str, Any]:
    needs_second = options["metric"] in PAIR_METRICS or options["slice"] == 2
    if needs_second and options["drawing2"] is None:
        raise vol.Invalid(f"--metric {options['metric']} needs --drawing2")
    return options


def _cluster_size_bounds(options: dict[str, Any]) -> dict[str, Any]:
    low, high = options["cluster_size_min"], options["cluster_size_max"]
    if low is not None and high is not None and low > high:
        raise vol.Invalid("--cluster-size-min exceeds --cluster-size-max")
    return options


COMMAND_GENERATE_SCHEMA = vol.All(
    vol.Schema(
        {
            vol.Required("kind"): vol.In([KIND_CLUSTER, KIND_DISTANCE]),
            vol.Required("count"): _POSITIVE,
            vol.Required(CONF_SEED): _SEED,
            vol.Required("out"): str,
            vol.Required("base_vertices"): _optional(
                vol.All(vol.Coerce(int), vol.Range(min=1, max=MAX_BASE_VERTEX_COUNT))
            ),
            vol.Required("cluster_size_min"): _optional(
                vol.All(vol.Coerce(int), vol.Range(min=2))
            ),
            vol.Required("cluster_size_max"): _optional(
                vol.All(vol.Coerce(int), vol.Range(min=2))
            ),
            vol.Required("intra_density"): _optional(_DENSITY),
            vol.Required("inter_edges"): _optional(_POSITIVE),
            vol.Required("merges"): _optional(vol.All(vol.Coerce(int), vol.Range(min=0))),
            vol.Required("splits"): _optional(vol.All(vol.Coerce(int), vol.Range(min=0))),
            vol.Required("vertices"): _optional(
                vol.All(
                    vol.Coerce(int),
                    vol.Range(min=MIN_DISTANCE_VERTICES, max=MAX_DISTANCE_VERTICES),
                )
            ),
            vol.Required("backbone"): _optional(vol.In([BACKBONE_TREE, BACKBONE_PATH])),
            vol.Required("shortcuts"): _optional(vol.All(vol.Coerce(int), vol.Range(min=0))),
            vol.Required("diameter_ratio"): _optional(
                vol.All(
                    vol.Coerce(float),
                    vol.Range(min=0.0, max=1.0, min_included=False, max_included=False),
                )
            ),
        }
    ),
    _cluster_size_bounds,
)

COMMAND_LAYOUT_SCHEMA = vol.Schema(
    {
        vol.Required("dataset"): str,
        vol.Required("algo"): vol.In(list(BUILTIN_LAYOUTS)),
        vol.Required(CONF_SEED): _SEED,
        vol.Required("out"): str,
    }
)

COMMAND_DEFORM_SCHEMA = vol.Schema(
    {
        vol.Required("dataset"): str,
        vol.Required("drawing"): str,
        vol.Required("kind"): vol.In([KIND_CLUSTER, KIND_DISTANCE]),
        vol.Required(CONF_STEPS): vol.All(vol.Coerce(int), vol.Range(min=1, max=MAX_STEPS)),
        vol.Required(CONF_SEED): _SEED,
        vol.Required(CONF_FACTOR): vol.All(
            vol.Coerce(float), vol.Range(min=1.0, min_included=False)
        ),
        vol.Required("out"): str,
    }
)

COMMAND_METRIC_SCHEMA = vol.All(
    vol.Schema(
        {
            vol.Required("dataset"): str,
            vol.Required("drawing1"): str,
            vol.Required("drawing2"): vol.Any(None, str),
            vol.Required("metric"): vol.In(
                [METRIC_CCQ, METRIC_DCQ1, METRIC_DCQ2, METRIC_CQ, METRIC_STRESS]
            ),
            vol.Required("index"): vol.In([INDEX_ARI, INDEX_FMI]),
            vol.Required("slice"): vol.In([1, 2]),
            vol.Required("change"): vol.In([CHANGE_SIMILARITY, CHANGE_DISSIMILARITY]),
            vol.Required(CONF_SEED): _SEED,
        }
    ),
    _pair_metric_needs_second_drawing,
)

COMMAND_EXPERIMENT_SCHEMA = vol.Schema(
    {
        vol.Required("which"): vol.In(
            [
                EXPERIMENT_CCQ_VALIDATION,
                EXPERIMENT_DCQ_VALIDATION,
                EXPERIMENT_CCQ_COMPARISON,
                EXPERIMENT_DCQ_COMPARISON,
            ]
        ),
        vol.Required("datasets"): vol.Any(None, str),
        vol.Required("count"): _POSITIVE,
        vol.Required(CONF_STEPS): vol.All(vol.Coerce(int), vol.Range(min=0, max=MAX_STEPS)),
        vol.Required(CONF_WORKERS): vol.All(
            vol.Coerce(int), vol.Range(min=1, max=MAX_WORKERS)
        ),
        vol.Required("layout"): vol.Any(None, [str]),
        vol.Required("change"): vol.In([CHANGE_SIMILARITY, CHANGE_DISSIMILARITY]),
        vol.Required(CONF_SEED): _SEED,
        vol.Required("out"): str,
    }
)


def _print(value: float) -> None:
    sys.stdout.write(f"{value!r}\n")


def _handle_generate(options: dict[str, Any]) -> int:
    out = Path(options["out"])
    if options["kind"] == KIND_CLUSTER:
        overrides: dict[str, Any] = {
            "base_vertex_count": options["base_vertices"],
            "merges": options["merges"],
            "splits": options["splits"],
            "intra_density": options["intra_density"],
            "inter_edge_count": options["inter_edges"],
        }
        low, high = options["cluster_size_min"], options["cluster_size_max"]
        if low is not None or high is not None:
            default_low, default_high = DEFAULT_CLUSTER_SIZE_RANGE
            if high is None:
                high = max(low, default_high)
            if low is None:
                low = min(high, default_low)
            overrides["cluster_size_range"] = (low, high)
        datasets = generate_cluster_datasets(
            options["count"],
            options[CONF_SEED],
            **{key: value for key, value in overrides.items() if value is not None},
        )
    else:
        overrides = {
            "vertex_count": options["vertices"],
            "backbone": options["backbone"],
            "shortcut_count": options["shortcuts"],
            "diameter_ratio": options["diameter_ratio"],
        }
        datasets = generate_distance_datasets(
            options["count"],
            options[CONF_SEED],
            **{key: value for key, value in overrides.items() if value is not None},
        )

    if len(datasets) == 1:
        save_dataset(datasets[0].pair, out)
        _LOGGER.info("Wrote %s", out)
    else:
        save_datasets(datasets, out)
        _LOGGER.info("Wrote %s datasets to %s", len(datasets), out)
    return EXIT_OK


def _handle_layout(options: dict[str, Any]) -> int:
    pair = load_dataset(options["dataset"])
    drawings = BUILTIN_LAYOUTS[options["algo"]](pair, options[CONF_SEED])
    out = Path(options["out"])
    for position, drawing in enumerate(drawings, start=1):
        save_coordinates(drawing, out / f"drawing{position}.txt")
    _LOGGER.info("Wrote %s drawings to %s", options["algo"], out)
    return EXIT_OK


def _handle_deform(options: dict[str, Any]) -> int:
    pair = load_dataset(options["dataset"])
    drawing = load_coordinates(options["drawing"], pair.vertex_count)
    if options["kind"] == KIND_CLUSTER:
        schedule = cluster_deformation_steps(drawing, options[CONF_STEPS], options[CONF_SEED])
    else:
        schedule = distance_deformation_steps(
            drawing,
            pair.slice2,
            options[CONF_STEPS],
            options[CONF_SEED],
            factor=options[CONF_FACTOR],
        )
    out = Path(options["out"])
    save_coordinates(drawing, out / "step_00.txt")
    for step, deformed in enumerate(schedule, start=1):
        save_coordinates(deformed, out / f"step_{step:02d}.txt")
    _LOGGER.info("Wrote %s deformation steps to %s", options[CONF_STEPS], out)
    return EXIT_OK


def _metric_value(pair: DynamicPair, options: dict[str, Any]) -> float:
    n = pair.vertex_count
    drawing1 = load_coordinates(options["drawing1"], n)
    drawing2 = (
        None if options["drawing2"] is None else load_coordinates(options["drawing2"], n)
    )
    metric = options["metric"]
    seed = options[CONF_SEED]
    index = ClusteringIndex(options["index"])

    if metric in (METRIC_CQ, METRIC_STRESS):
        position = options["slice"]
        drawing = drawing1 if position == 1 else drawing2
        assert drawing is not None
        slice_ = pair.slice1 if position == 1 else pair.slice2
        if metric == METRIC_STRESS:
            return stress(slice_, drawing)
        clustering = pair.clustering1 if position == 1 else pair.clustering2
        if clustering is None:
            raise InvalidGraphError("Dataset has no ground truth clusterings")
        return cq(clustering, drawing, index, seed)

    assert drawing2 is not None
    if metric == METRIC_CCQ:
        if pair.clustering1 is None or pair.clustering2 is None:
            raise InvalidGraphError("Dataset has no ground truth clusterings")
        geometric1 = geometric_clustering(drawing1, pair.clustering1.cluster_count, seed)
        geometric2 = geometric_clustering(drawing2, pair.clustering2.cluster_count, seed)
        return ccq(
            ClusterChangeInput.from_clusterings(
                (pair.clustering1, pair.clustering2),
                (geometric1, geometric2),
                index,
                options["change"],
            )
        )
    change = DistanceChangeInput.from_drawings(pair, drawing1, drawing2)
    if metric == METRIC_DCQ1:
        return dcq1(change)
    return dcq2(change, diameter(pair.slice1), diameter(pair.slice2))


def _handle_metric(options: dict[str, Any]) -> int:
    pair = load_dataset(options["dataset"])
    _print(_metric_value(pair, options))
    return EXIT_OK


def _parse_layouts(specs: Sequence[str] | None, kind: str) -> list[LayoutSource]:
    if not specs:
        return list(DEFAULT_COMPARISON_LAYOUTS[kind])
    layouts: list[LayoutSource] = []
    for spec in specs:
        name, separator, directory = spec.partition("=")
        if separator:
            layouts.append(ImportedLayout(name=name, directory=Path(directory)))
        else:
            layouts.append(name)
    return layouts


def _experiment_datasets(options: dict[str, Any], kind: str) -> list[Dataset]:
    if options["datasets"] is not None:
        return load_datasets(options["datasets"])
    if kind == KIND_CLUSTER:
        return generate_cluster_datasets(options["count"], options[CONF_SEED])
    return generate_distance_datasets(options["count"], options[CONF_SEED])


def _handle_experiment(options: dict[str, Any]) -> int:
    which = options["which"]
    kind = (
        KIND_CLUSTER
        if which in (EXPERIMENT_CCQ_VALIDATION, EXPERIMENT_CCQ_COMPARISON)
        else KIND_DISTANCE
    )
    config = ExperimentConfig.from_options(
        {
            CONF_STEPS: options[CONF_STEPS],
            CONF_WORKERS: options[CONF_WORKERS],
            CONF_SEED: options[CONF_SEED],
            CONF_CHANGE_MEASURE: options["change"],
        }
    )
    datasets = _experiment_datasets(options, kind)
    coordinator = ExperimentCoordinator(config)
    coordinator.add_listener(
        lambda dataset_id, done, total: _LOGGER.info(
            "Finished %s (%s/%s)", dataset_id, done, total
        )
    )

    trace: ExperimentTrace
    if which == EXPERIMENT_CCQ_VALIDATION:
        trace = asyncio.run(coordinator.async_run_ccq_validation(datasets))
    elif which == EXPERIMENT_DCQ_VALIDATION:
        trace = asyncio.run(coordinator.async_run_dcq_validation(datasets))
    else:
        layouts = _parse_layouts(options["layout"], kind)
        trace = asyncio.run(
            coordinator.async_run_layout_comparison(datasets, layouts, kind)
        )

    out = Path(options["out"])
    write_results_csv(trace, out / RESULTS_FILE)
    write_summary_csv(trace, out / SUMMARY_FILE)
    render_trend_svg(trace, out / TREND_FILE)
    for group in trace.groups():
        for metric, statistic in trend_summary(trace, group).items():
            _LOGGER.info(
                "%s %s: first %.4f, last %.4f, drop %.4f, spearman %.3f",
                group,
                metric,
                statistic.first,
                statistic.last,
                statistic.drop,
                statistic.spearman,
            )
    return EXIT_OK


COMMANDS: dict[str, tuple[Callable[[Any], Any], Callable[[dict[str, Any]], int]]] = {
    "generate": (COMMAND_GENERATE_SCHEMA, _handle_generate),
    "layout": (COMMAND_LAYOUT_SCHEMA, _handle_layout),
    "deform": (COMMAND_DEFORM_SCHEMA, _handle_deform),
    "metric": (COMMAND_METRIC_SCHEMA, _handle_metric),
    "experiment": (COMMAND_EXPERIMENT_SCHEMA, _handle_experiment),
}


class CommandParser(argparse.ArgumentParser):
    """Argument parser that reports bad arguments with the validation exit code."""

    def error(self, message: str) -> NoReturn:
        """Print usage and exit with EXIT_VALIDATION_ERROR."""
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser for every subcommand."""
    parser = CommandParser(
        prog="change-faithfulness",
        description="Measure how faithfully dynamic graph drawings show change.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", help="generate synthetic datasets")
    generate.add_argument("kind", choices=[KIND_CLUSTER, KIND_DISTANCE])
    generate.add_argument("--count", type=int, default=1)
    generate.add_argument("--seed", type=int, default=DEFAULT_SEED)
    generate.add_argument("--out", required=True)
    generate.add_argument("--base-vertices", dest="base_vertices", type=int)
    generate.add_argument("--cluster-size-min", dest="cluster_size_min", type=int)
    generate.add_argument("--cluster-size-max", dest="cluster_size_max", type=int)
    generate.add_argument("--intra-density", dest="intra_density", type=float)
    generate.add_argument("--inter-edges", dest="inter_edges", type=int)
    generate.add_argument("--merges", type=int)
    generate.add_argument("--splits", type=int)
    generate.add_argument("--vertices", type=int)
    generate.add_argument("--backbone", choices=[BACKBONE_TREE, BACKBONE_PATH])
    generate.add_argument("--shortcuts", type=int)
    generate.add_argument("--diameter-ratio", dest="diameter_ratio", type=float)

    layout = commands.add_parser("layout", help="draw both slices of a dataset")
    layout.add_argument("--dataset", required=True)
    layout.add_argument("--algo", required=True, choices=list(BUILTIN_LAYOUTS))
    layout.add_argument("--seed", type=int, default=DEFAULT_SEED)
    layout.add_argument("--out", required=True)

    deform = commands.add_parser("deform", help="deform a drawing of the second slice")
    deform.add_argument("--dataset", required=True)
    deform.add_argument("--drawing", required=True)
    deform.add_argument("--kind", required=True, choices=[KIND_CLUSTER, KIND_DISTANCE])
    deform.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    deform.add_argument("--seed", type=int, default=DEFAULT_SEED)
    deform.add_argument("--factor", type=float, default=DEFAULT_STRETCH_FACTOR)
    deform.add_argument("--out", required=True)

    metric = commands.add_parser("metric", help="score drawings of a dataset")
    metric.add_argument("--dataset", required=True)
    metric.add_argument("--drawing1", required=True)
    metric.add_argument("--drawing2")
    metric.add_argument(
        "--metric",
        required=True,
        choices=[METRIC_CCQ, METRIC_DCQ1, METRIC_DCQ2, METRIC_CQ, METRIC_STRESS],
    )
    metric.add_argument("--index", choices=[INDEX_ARI, INDEX_FMI], default=INDEX_ARI)
    metric.add_argument("--slice", type=int, choices=[1, 2], default=1)
    metric.add_argument(
        "--change",
        choices=[CHANGE_SIMILARITY, CHANGE_DISSIMILARITY],
        default=DEFAULT_CHANGE_MEASURE,
        help="how a clustering index becomes a CCQ change value",
    )
    metric.add_argument("--seed", type=int, default=DEFAULT_SEED)

    experiment = commands.add_parser("experiment", help="run a validation or comparison")
    experiment.add_argument(
        "--which",
        required=True,
        choices=[
            EXPERIMENT_CCQ_VALIDATION,
            EXPERIMENT_DCQ_VALIDATION,
            EXPERIMENT_CCQ_COMPARISON,
            EXPERIMENT_DCQ_COMPARISON,
        ],
    )
    experiment.add_argument("--datasets")
    experiment.add_argument("--count", type=int, default=DEFAULT_DATASET_COUNT)
    experiment.add_argument("--steps", type=int, default=DEFAULT_STEPS)
    experiment.add_argument("--workers", type=int, default=DEFAULT_WORKERS)
    experiment.add_argument(
        "--layout", action="append", help="NAME of a built-in layout or NAME=DIR"
    )
    experiment.add_argument(
        "--change",
        choices=[CHANGE_SIMILARITY, CHANGE_DISSIMILARITY],
        default=DEFAULT_CHANGE_MEASURE,
        help="how a clustering index becomes a CCQ change value",
    )
    experiment.add_argument("--seed", type=int, default=DEFAULT_SEED)
    experiment.add_argument("--out", required=True)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line interface and return the exit code."""
    args = vars(build_parser().parse_args(argv))
    verbose = args.pop("verbose")
    command = args.pop("command")
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    schema, handler = COMMANDS[command]
    try:
        return handler(schema(args))
    except vol.Invalid as err:
        _LOGGER.error("Invalid arguments: %s", err)
        return EXIT_VALIDATION_ERROR
    except StorageError as err:
        _LOGGER.error("%s", err)
        return EXIT_IO_ERROR
    except OSError as err:
        _LOGGER.error("I/O error: %s", err)
        return EXIT_IO_ERROR
    except FaithfulnessError as err:
        _LOGGER.error("%s", err)
        return EXIT_VALIDATION_ERROR
