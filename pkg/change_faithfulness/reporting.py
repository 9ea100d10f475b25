"""Result CSV files and SVG trend charts."""

from __future__ import annotations

import csv
import io
import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .const import CSV_HEADER, LAYOUT_SEPARATOR, SUMMARY_HEADER  # noqa: E402
from .exceptions import EmptyTraceError, ParseError  # noqa: E402
from .experiments import GROUP_ALL, DatasetTrace, ExperimentTrace, MetricReport  # noqa: E402
from .storage import read_text_file, write_text_file  # noqa: E402

_LOGGER = logging.getLogger(__name__)

_SVG_HASH_SALT = "change-faithfulness"


def _require_data(trace: ExperimentTrace) -> None:
    if trace.is_empty:
        raise EmptyTraceError(f"Trace of {trace.experiment or 'experiment'} is empty")


def _csv_text(header: tuple[str, ...], rows: list[list[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def write_results_csv(trace: ExperimentTrace, path: str | Path) -> None:
    """Write one ``dataset,step,metric,value`` row per recorded value."""
    _require_data(trace)
    order = trace.metric_names
    rows = [
        [dataset.label, str(step), metric, repr(float(report[metric]))]
        for dataset in trace.datasets
        for step, report in enumerate(dataset.steps)
        for metric in order
        if metric in report.names
    ]
    write_text_file(Path(path), _csv_text(CSV_HEADER, rows))
    _LOGGER.info("Wrote %s result rows to %s", len(rows), path)


def read_results_csv(path: str | Path, experiment: str = "") -> ExperimentTrace:
    """Load a results CSV back into a trace."""
    path = Path(path)
    reader = csv.reader(io.StringIO(read_text_file(path)))
    header = next(reader, None)
    if header is None or tuple(header) != CSV_HEADER:
        raise ParseError(f"{path}: expected header {','.join(CSV_HEADER)}")

    values: dict[str, dict[int, dict[str, float]]] = {}
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(CSV_HEADER):
            raise ParseError(f"{path}:{lineno}: expected {len(CSV_HEADER)} fields")
        label, step_text, metric, value_text = row
        try:
            step, value = int(step_text), float(value_text)
        except ValueError as err:
            raise ParseError(f"{path}:{lineno}: {err}") from err
        steps = values.setdefault(label, {})
        if metric in steps.setdefault(step, {}):
            raise ParseError(f"{path}:{lineno}: duplicate {metric} at step {step}")
        steps[step][metric] = value

    datasets = []
    for label, steps in values.items():
        if sorted(steps) != list(range(len(steps))):
            raise ParseError(f"{path}: steps of {label} are not contiguous from 0")
        dataset_id, _, layout = label.partition(LAYOUT_SEPARATOR)
        try:
            datasets.append(
                DatasetTrace(
                    dataset_id=dataset_id,
                    steps=[MetricReport(steps[step]) for step in range(len(steps))],
                    layout=layout or None,
                )
            )
        except ValueError as err:
            raise ParseError(f"{path}: {err}") from err
    try:
        return ExperimentTrace(experiment=experiment, datasets=datasets)
    except ValueError as err:
        raise ParseError(f"{path}: {err}") from err


def write_summary_csv(trace: ExperimentTrace, path: str | Path) -> None:
    """Write the mean and standard deviation of every metric at every step."""
    _require_data(trace)
    means = trace.aggregate()
    deviations = trace.aggregate_std()
    rows = [
        [group, str(step), metric, repr(mean), repr(deviations[group][metric][step])]
        for group, metrics in means.items()
        for metric, series in metrics.items()
        for step, mean in enumerate(series)
    ]
    write_text_file(Path(path), _csv_text(SUMMARY_HEADER, rows))


def render_trend_svg(trace: ExperimentTrace, path: str | Path) -> None:
    """Plot the mean of each metric against the step, one line per series."""
    _require_data(trace)
    means = trace.aggregate()
    with plt.rc_context({"svg.hashsalt": _SVG_HASH_SALT}):
        fig, ax = plt.subplots(figsize=(8, 5))
        for group, metrics in means.items():
            for metric, series in metrics.items():
                label = metric if group == GROUP_ALL else f"{group} {metric}"
                ax.plot(range(len(series)), series, marker="o", label=label)
        ax.set_xlabel("step")
        ax.set_ylabel("mean value")
        if trace.experiment:
            ax.set_title(trace.experiment)
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize="small")
        buffer = io.StringIO()
        fig.savefig(buffer, format="svg", metadata={"Date": None})
        plt.close(fig)
    write_text_file(Path(path), buffer.getvalue())
    _LOGGER.info("Wrote trend chart to %s", path)
