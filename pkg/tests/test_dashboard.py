import pandas as pd

from conftest import SWEEP, sample_report
from models.classifier import GovernorState
from pages.shared import ResultsLocation, TimelineReplay, load_results, metric_cards
from pages.sweep_page import column_defs, filter_type, header_name, rounded
from pages.timeline_page import status_text
from utils.report import write_report, write_table

TIMELINE = pd.DataFrame(
    {
        "second": range(5),
        "sent": [50] * 5,
        "packet_rate": [50, 50, 50, 24, 24],
        "reference_size": [None, None, 33.5, 33.5, 34.0],
        "governor": [GovernorState.ACTIVE.value] * 4 + [GovernorState.SUSPENDED.value],
    }
)


class TestLoadResults:
    def test_empty_directory(self, tmp_path):
        bundle = load_results(tmp_path)
        assert bundle.is_empty

    def test_reads_what_is_there(self, tmp_path):
        write_report(tmp_path / "metrics.json", sample_report())
        write_table(tmp_path / "sweep.json", SWEEP, "json")
        write_table(tmp_path / "timeline.csv", TIMELINE, "csv")
        bundle = load_results(tmp_path)
        assert bundle.metrics == sample_report()
        assert len(bundle.sweep) == 3
        assert list(bundle.timeline["second"]) == [0, 1, 2, 3, 4]

    def test_bad_metrics_file_is_skipped(self, tmp_path):
        (tmp_path / "metrics.json").write_text("{", encoding="utf-8")
        write_table(tmp_path / "sweep.csv", SWEEP, "csv")
        bundle = load_results(tmp_path)
        assert bundle.metrics is None
        assert bundle.sweep is not None

    def test_location(self, tmp_path):
        ResultsLocation.set(tmp_path)
        assert ResultsLocation.load().directory == tmp_path


class TestMetricCards:
    def test_formats_values(self):
        cards = dict(metric_cards(sample_report()))
        assert cards["Steganographic bandwidth"] == "2,781.1 bit/s"
        assert cards["Classifier precision"] == "n/a"
        assert cards["Packets sent / delivered"] == "15,000 / 15,000"


class TestGridHelpers:
    def test_filter_types(self):
        assert filter_type(SWEEP["utilization_pct"].dtype) == "agNumberColumnFilter"
        assert filter_type(TIMELINE["governor"].dtype) == "agTextColumnFilter"

    def test_header_name(self):
        assert header_name("packet_rate_pps") == "Packet Rate Pps"

    def test_column_defs(self):
        defs = column_defs(SWEEP)
        assert [definition["field"] for definition in defs] == list(SWEEP.columns)
        assert all(definition["floatingFilter"] for definition in defs)
        assert "filter" not in column_defs(SWEEP, filters=False)[0]

    def test_rounded_skips_missing_columns(self):
        frame = rounded(SWEEP, {"packet_rate_pps": 0, "absent": 2})
        assert frame["packet_rate_pps"].tolist() == [50.0, 17.0, 18.0]


class TestTimelineReplay:
    def test_steps_through_rows(self):
        replay = TimelineReplay(TIMELINE, window=3, step=2)
        assert replay.current is None
        assert [row["second"] for row in replay.advance()] == [0, 1]
        assert replay.current["reference_size"] is None
        replay.advance()
        replay.advance()
        assert replay.finished
        assert [row["second"] for row in replay.visible] == [2, 3, 4]
        assert replay.advance() == []

    def test_rewind(self):
        replay = TimelineReplay(TIMELINE)
        replay.advance()
        replay.rewind()
        assert replay.position == 0
        assert not replay.visible

    def test_status_text(self):
        replay = TimelineReplay(TIMELINE, step=3)
        replay.advance()
        text = status_text(replay.current, replay.position, len(replay.rows))
        assert "r = 33.50 B" in text
        assert "3/5 s" in text
        assert status_text(None, 0, 5) == "0/5 s"
