from nicegui import ui

from components import PageLayout

from .shared import ResultsLocation, metric_cards


@PageLayout(title="Call overview", subtitle=lambda: str(ResultsLocation.directory))
def overview_page(layout: PageLayout):
    """Headline metrics of the simulated call in the results directory."""
    bundle = ResultsLocation.load()
    with ui.column().classes("p-6 gap-4 w-full max-w-5xl mx-auto"):
        if bundle.metrics is None:
            ui.label("No metrics.json found.").classes("text-lg")
            ui.markdown("Run `uv run src/main.py simulate --out <dir>` and point the dashboard at `<dir>`.")
            return

        with ui.grid(columns=3).classes("w-full gap-4"):
            for label, value in metric_cards(bundle.metrics):
                with ui.card().classes("p-4"):
                    ui.label(label).classes("text-sm opacity-70")
                    ui.label(value).classes("text-2xl font-semibold")

        if bundle.sweep is not None:
            ui.link("Utilization sweep available", "/sweep").classes("text-primary")
