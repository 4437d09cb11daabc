"""Dashboard routes and server start-up."""

import logging
from pathlib import Path

from nicegui import ui

from .overview_page import overview_page
from .shared import ResultsLocation
from .sweep_page import sweep_page
from .timeline_page import timeline_page

logger = logging.getLogger(__name__)


@ui.page("/")
def index_route():
    overview_page()


@ui.page("/sweep")
def sweep_route():
    sweep_page()


@ui.page("/timeline")
def timeline_route():
    timeline_page()


def run_dashboard(results: Path, port: int = 8080) -> None:
    """Serve the dashboard for ``results`` until interrupted."""
    ResultsLocation.set(results)
    logger.info("serving %s on port %d", results, port)
    ui.run(
        title="Covert channel lab",
        port=port,
        dark=None,
        reload=False,
        show=False,
        storage_secret="skyde-lab-dashboard",
    )
