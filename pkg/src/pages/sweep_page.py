from typing import Literal

import pandas as pd
from nicegui import ui

from components import PageLayout

from .shared import ResultsLocation

RowSelectionMode = Literal["singleRow", "multiRow"]

# Decimals shown per sweep column
SWEEP_DECIMALS = {
    "measured_bandwidth_bps": 1,
    "predicted_bandwidth_bps": 1,
    "packet_rate_pps": 2,
    "silence_reference_size_b": 2,
    "total_loss_fraction": 4,
    "effective_utilization": 4,
    "histogram_correlation": 4,
}


def filter_type(dtype) -> str:
    """AG Grid filter matching a pandas dtype."""
    if pd.api.types.is_datetime64_any_dtype(dtype):
        return "agDateColumnFilter"
    if pd.api.types.is_integer_dtype(dtype) or pd.api.types.is_float_dtype(dtype):
        return "agNumberColumnFilter"
    return "agTextColumnFilter"


def header_name(column: str) -> str:
    """``packet_rate_pps`` -> ``Packet Rate Pps``."""
    return " ".join(word.capitalize() for word in column.replace("_", " ").split())


def column_defs(df: pd.DataFrame, filters: bool = True) -> list[dict]:
    """AG Grid column definitions for ``df``, read-only."""
    defs = []
    for column in df.columns:
        definition = {"field": str(column), "headerName": header_name(str(column)), "editable": False}
        if filters:
            definition["filter"] = filter_type(df[column].dtype)
            definition["floatingFilter"] = True
        defs.append(definition)
    return defs


def rounded(df: pd.DataFrame, decimals: dict[str, int]) -> pd.DataFrame:
    present = {column: places for column, places in decimals.items() if column in df.columns}
    return df.round(present)


def aggrid_from_pandas(
    df: pd.DataFrame,
    *,
    filters: bool = True,
    theme: str = "balham",
    row_selection_mode: RowSelectionMode | None = None,
) -> ui.aggrid:
    """AG Grid over a DataFrame with typed filters.

    Args:
        df: Table to show.
        filters: Whether columns get floating filters.
        theme: AG Grid theme.
        row_selection_mode: Optional row selection mode.
    """
    options: dict = {"columnDefs": column_defs(df, filters)}
    if row_selection_mode:
        options["rowSelection"] = {"mode": row_selection_mode}
    return ui.aggrid.from_pandas(df, theme=theme, options=options)


@PageLayout(title="Utilization sweep", subtitle=lambda: str(ResultsLocation.directory))
def sweep_page(layout: PageLayout):
    bundle = ResultsLocation.load()
    with ui.column().classes("p-4 gap-3 w-full"):
        if bundle.sweep is None:
            ui.label("No sweep table found; run the sweep command first.").classes("text-lg")
            return
        grid = aggrid_from_pandas(rounded(bundle.sweep, SWEEP_DECIMALS), row_selection_mode="singleRow")
        grid.classes("h-[60dvh]")
        selected = ui.label("Select a row for its details.").classes("text-sm opacity-80")

        async def show_selection(_event) -> None:
            row = await grid.get_selected_row()
            if row:
                selected.set_text(
                    f"u = {row['utilization_pct']}%: {row['measured_bandwidth_bps']} bit/s measured, "
                    f"{row['predicted_bandwidth_bps']} bit/s predicted, "
                    f"{row['packet_rate_pps']} packet/s"
                )

        grid.on("selectionChanged", show_selection)
