"""Plot-ready figure dictionaries built from pandas DataFrames.

Nothing is rendered here. The dictionaries follow the Plotly JS shape
(``{"data": [...], "layout": {...}}``) so any plotting front end can draw them.
"""

import math
from typing import Any, Literal

import pandas as pd

from models.errors import RejectedInputError

ChartType = Literal["bar", "line", "scatter"]

DEFAULT_MARGIN = {"l": 40, "r": 20, "t": 40, "b": 40}


def dataframe_to_figure(
    df: pd.DataFrame,
    x_column: str,
    y_columns: str | list[str],
    chart_type: ChartType = "scatter",
    layout: dict[str, Any] | None = None,
) -> dict[str, Any]:
    """Turn DataFrame columns into a figure dictionary, one trace per y column.

    Args:
        df: Source table.
        x_column: Column for the x axis.
        y_columns: One column or several; each becomes a trace named after it.
        chart_type: "bar", "line" or "scatter".
        layout: Layout properties merged over the defaults.

    Returns:
        ``{"data": [...], "layout": {...}}`` with missing values as None.

    Raises:
        RejectedInputError: If a column is missing or the chart type is unknown.
    """
    if isinstance(y_columns, str):
        y_columns = [y_columns]
    missing = [column for column in [x_column, *y_columns] if column not in df.columns]
    if missing:
        raise RejectedInputError(f"columns not found in DataFrame: {missing}")

    x_values = _json_values(df[x_column])
    traces = [_trace(x_values, _json_values(df[column]), column, chart_type) for column in y_columns]

    figure_layout: dict[str, Any] = {"margin": dict(DEFAULT_MARGIN)}
    if chart_type == "bar" and len(traces) > 1:
        figure_layout["barmode"] = "group"
    if layout:
        figure_layout = _deep_merge(figure_layout, layout)
    return {"data": traces, "layout": figure_layout}


def _json_values(series: pd.Series) -> list:
    values = series.tolist()
    return [None if isinstance(value, float) and math.isnan(value) else value for value in values]


def _trace(x_values: list, y_values: list, name: str, chart_type: ChartType) -> dict[str, Any]:
    trace: dict[str, Any] = {"x": x_values, "y": y_values, "name": name}
    if chart_type == "bar":
        trace["type"] = "bar"
    elif chart_type == "line":
        trace.update(type="scatter", mode="lines", line={"width": 2})
    elif chart_type == "scatter":
        trace.update(type="scatter", mode="markers", marker={"size": 8})
    else:
        raise RejectedInputError(f"unsupported chart type: {chart_type}")
    return trace


def _deep_merge(base: dict, override: dict) -> dict:
    """Merge ``override`` into a copy of ``base``, recursing into nested dicts."""
    merged = base.copy()
    for key, value in override.items():
        if isinstance(merged.get(key), dict) and isinstance(value, dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged
