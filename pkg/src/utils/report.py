"""Result files: metrics JSON, CSV tables and plot-ready figure documents."""

import json
import logging
from pathlib import Path
from typing import Any

import pandas as pd

from models.errors import MalformedMessageError, RejectedInputError
from models.metrics import MetricsReport

from .figures import dataframe_to_figure

logger = logging.getLogger(__name__)

# Fixed decimal formatting keeps CSV output diffable across runs
CSV_FLOAT_FORMAT = "%.6f"

REPORT_SCALARS: tuple[str, ...] = (
    "duration_s",
    "steg_bandwidth_bps",
    "offered_bandwidth_bps",
    "total_loss_fraction",
    "histogram_correlation",
    "classifier_precision",
    "classifier_recall",
    "silence_fraction",
    "effective_utilization",
    "packets_sent",
    "packets_delivered",
    "packets_embedded",
    "governor_suspensions",
    "uniformity_pvalue",
)


def write_json(path: str | Path, document: Any) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(document, handle, indent=2, sort_keys=True)
        handle.write("\n")


def write_report(path: str | Path, report: MetricsReport) -> None:
    """Write a metrics report as JSON; floats keep their exact repr so reading it back is lossless."""
    write_json(path, report.to_dict())


def read_report(path: str | Path) -> MetricsReport:
    """Read a metrics report written by ``write_report``.

    Raises:
        MalformedMessageError: If the file is not a metrics report.
    """
    with open(path, encoding="utf-8") as handle:
        try:
            data = json.load(handle)
            return MetricsReport.from_dict(data)
        except (json.JSONDecodeError, TypeError) as exc:
            raise MalformedMessageError(f"{path} is not a metrics report: {exc}") from exc


def reports_frame(reports: list[MetricsReport], seeds: list[int] | None = None) -> pd.DataFrame:
    """Scalar fields of one or more reports, one row each."""
    rows = [{name: getattr(report, name) for name in REPORT_SCALARS} for report in reports]
    frame = pd.DataFrame(rows, columns=list(REPORT_SCALARS))
    if seeds is not None:
        frame.insert(0, "seed", seeds)
    return frame


def write_table(path: str | Path, frame: pd.DataFrame, fmt: str = "csv") -> None:
    """Write a table as CSV (fixed decimals) or as a JSON list of records."""
    if fmt == "csv":
        frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    elif fmt == "json":
        write_json(path, json.loads(frame.to_json(orient="records")))
    else:
        raise RejectedInputError(f"unsupported table format: {fmt}")
    logger.debug("wrote %d rows to %s", len(frame), path)


def read_table(path: str | Path) -> pd.DataFrame:
    path = Path(path)
    if path.suffix == ".json":
        with open(path, encoding="utf-8") as handle:
            return pd.DataFrame(json.load(handle))
    return pd.read_csv(path)


def sweep_figures(sweep: pd.DataFrame) -> dict[str, dict[str, Any]]:
    """Plot-ready figure documents for a utilization sweep."""
    return {
        "bandwidth": dataframe_to_figure(
            sweep,
            "utilization_pct",
            ["measured_bandwidth_bps", "predicted_bandwidth_bps"],
            chart_type="line",
            layout={"xaxis": {"title": "Utilization [%]"}, "yaxis": {"title": "Bandwidth [bit/s]"}},
        ),
        "packet_rate": dataframe_to_figure(
            sweep,
            "utilization_pct",
            "packet_rate_pps",
            chart_type="bar",
            layout={"xaxis": {"title": "Utilization [%]"}, "yaxis": {"title": "Packet rate [packet/s]"}},
        ),
        "loss": dataframe_to_figure(
            sweep,
            "utilization_pct",
            "total_loss_fraction",
            chart_type="scatter",
            layout={"yaxis": {"title": "Total loss fraction", "range": [0, 1]}},
        ),
    }


def report_figures(report: MetricsReport) -> dict[str, dict[str, Any]]:
    """Plot-ready time series of one call."""
    frame = pd.DataFrame(
        {
            "second": range(len(report.packet_rate_series)),
            "packet_rate": report.packet_rate_series,
            "reference_size": report.reference_size_series,
        }
    )
    return {
        "packet_rate": dataframe_to_figure(frame, "second", "packet_rate", chart_type="line"),
        "reference_size": dataframe_to_figure(frame, "second", "reference_size", chart_type="line"),
    }
