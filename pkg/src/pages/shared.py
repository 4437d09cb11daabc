"""Results-directory access shared by the dashboard pages."""

import logging
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import pandas as pd

from models.errors import MalformedMessageError
from models.metrics import MetricsReport
from utils.report import read_report, read_table

logger = logging.getLogger(__name__)


@dataclass
class ResultsBundle:
    """Whatever a results directory holds; missing files are None."""

    directory: Path
    metrics: MetricsReport | None = None
    sweep: pd.DataFrame | None = None
    timeline: pd.DataFrame | None = None

    @property
    def is_empty(self) -> bool:
        return self.metrics is None and self.sweep is None and self.timeline is None


def load_results(directory: str | Path) -> ResultsBundle:
    """Load ``metrics.json``, ``sweep.csv``/``sweep.json`` and ``timeline.csv`` when present.

    Unreadable files are logged and skipped so one bad file does not hide the rest.
    """
    directory = Path(directory)
    bundle = ResultsBundle(directory=directory)
    try:
        if (directory / "metrics.json").exists():
            bundle.metrics = read_report(directory / "metrics.json")
    except (OSError, MalformedMessageError) as exc:
        logger.warning("skipping metrics: %s", exc)
    for attribute, names in (("sweep", ("sweep.csv", "sweep.json")), ("timeline", ("timeline.csv",))):
        for name in names:
            path = directory / name
            if not path.exists():
                continue
            try:
                setattr(bundle, attribute, read_table(path))
            except (OSError, ValueError) as exc:
                logger.warning("skipping %s: %s", path, exc)
            break
    return bundle


class ResultsLocation:
    """Directory the dashboard serves, set once by the ``dashboard`` command."""

    directory: Path = Path("results")

    @classmethod
    def set(cls, directory: Path) -> None:
        cls.directory = directory

    @classmethod
    def load(cls) -> ResultsBundle:
        return load_results(cls.directory)


def metric_cards(report: MetricsReport) -> list[tuple[str, str]]:
    """Label/value pairs for the overview page."""

    def fmt(value: float | None, pattern: str) -> str:
        return "n/a" if value is None else pattern.format(value)

    return [
        ("Steganographic bandwidth", fmt(report.steg_bandwidth_bps, "{:,.1f} bit/s")),
        ("Offered bandwidth", fmt(report.offered_bandwidth_bps, "{:,.1f} bit/s")),
        ("Total loss", fmt(report.total_loss_fraction, "{:.1%}")),
        ("Effective utilization", fmt(report.effective_utilization, "{:.1%}")),
        ("Silence fraction", fmt(report.silence_fraction, "{:.1%}")),
        ("Histogram correlation", fmt(report.histogram_correlation, "{:.4f}")),
        ("Classifier precision", fmt(report.classifier_precision, "{:.4f}")),
        ("Classifier recall", fmt(report.classifier_recall, "{:.4f}")),
        ("Packets sent / delivered", f"{report.packets_sent:,} / {report.packets_delivered:,}"),
        ("Packets embedded", f"{report.packets_embedded:,}"),
        ("Governor suspensions", str(report.governor_suspensions)),
    ]


class TimelineReplay:
    """Steps through a per-second timeline, keeping the most recent rows.

    Args:
        timeline: Rows ordered by ``second``.
        window: Number of rows kept visible.
        step: Seconds revealed per call to ``advance``.
    """

    def __init__(self, timeline: pd.DataFrame, window: int = 30, step: int = 1):
        self.rows = timeline.astype(object).where(timeline.notna(), None).to_dict(orient="records")
        self.visible: deque[dict] = deque(maxlen=window)
        self.step = step
        self.position = 0

    @property
    def finished(self) -> bool:
        return self.position >= len(self.rows)

    @property
    def current(self) -> dict | None:
        return self.visible[-1] if self.visible else None

    def advance(self) -> list[dict]:
        """Reveal the next ``step`` rows; returns them (empty once finished)."""
        revealed = self.rows[self.position : self.position + self.step]
        self.visible.extend(revealed)
        self.position += len(revealed)
        return revealed

    def rewind(self) -> None:
        self.visible.clear()
        self.position = 0
