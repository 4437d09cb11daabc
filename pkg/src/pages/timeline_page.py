"""Second-by-second replay of a simulated call.

A ``ui.timer`` reveals one more second of the timeline per tick and the
grid shows a rolling window of the latest rows.
"""

from nicegui import ui

from components import PageLayout

from .shared import ResultsLocation, TimelineReplay
from .sweep_page import column_defs

# Replay configuration
UPDATE_INTERVAL = 0.5  # seconds of wall time per step
STEP_SECONDS = 1  # call seconds revealed per step
MAX_ROWS = 30


def status_text(row: dict | None, position: int, total: int) -> str:
    if row is None:
        return f"0/{total} s"
    reference = row.get("reference_size")
    reference_text = "warming up" if reference is None else f"r = {reference:.2f} B"
    return (
        f"t = {row['second']} s · {row['packet_rate']} packet/s · {reference_text} · "
        f"governor {row['governor']} · {position}/{total} s"
    )


@PageLayout(title="Call timeline", subtitle=lambda: str(ResultsLocation.directory))
def timeline_page(layout: PageLayout):
    bundle = ResultsLocation.load()
    with ui.column().classes("w-full gap-3 p-2 sm:p-4"):
        if bundle.timeline is None:
            ui.label("No timeline.csv found; run the simulate command first.").classes("text-lg")
            return

        replay = TimelineReplay(bundle.timeline, window=MAX_ROWS, step=STEP_SECONDS)
        total = len(replay.rows)

        def refresh_view() -> None:
            grid.options["rowData"] = list(replay.visible)
            grid.update()
            status.set_text(status_text(replay.current, replay.position, total))

        def step() -> None:
            if replay.finished:
                timer.active = False
                return
            replay.advance()
            refresh_view()

        def restart() -> None:
            replay.rewind()
            refresh_view()
            timer.active = True

        with ui.row().classes("gap-4 items-center flex-wrap"):
            timer = ui.timer(UPDATE_INTERVAL, step, active=True)
            ui.switch("Play", value=True).bind_value(timer, "active")
            ui.button("Restart", icon="replay", on_click=restart).props("flat dense")

        status = ui.label(status_text(None, 0, total)).classes("text-xs sm:text-sm text-primary")
        grid = ui.aggrid({"columnDefs": column_defs(bundle.timeline, filters=False), "rowData": []}).classes(
            "h-[60dvh]"
        )
