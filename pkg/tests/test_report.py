import json

import pytest

from conftest import SWEEP, sample_report
from models.errors import MalformedMessageError, RejectedInputError
from utils.figures import dataframe_to_figure
from utils.report import (
    REPORT_SCALARS,
    read_report,
    read_table,
    report_figures,
    reports_frame,
    sweep_figures,
    write_report,
    write_table,
)


class TestMetricsJson:
    def test_write_then_read_is_lossless(self, tmp_path):
        report = sample_report()
        write_report(tmp_path / "metrics.json", report)
        assert read_report(tmp_path / "metrics.json") == report

    def test_output_is_stable(self, tmp_path):
        write_report(tmp_path / "a.json", sample_report())
        write_report(tmp_path / "b.json", sample_report())
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    @pytest.mark.parametrize("content", ["not json", '{"duration_s": 1.0}', "[1, 2]"])
    def test_rejects_other_documents(self, tmp_path, content):
        path = tmp_path / "metrics.json"
        path.write_text(content, encoding="utf-8")
        with pytest.raises(MalformedMessageError):
            read_report(path)


class TestTables:
    def test_reports_frame(self):
        frame = reports_frame([sample_report(), sample_report(packets_sent=1)], seeds=[1, 2])
        assert list(frame.columns) == ["seed", *REPORT_SCALARS]
        assert list(frame["packets_sent"]) == [15000, 1]

    def test_csv_uses_fixed_decimals(self, tmp_path):
        path = tmp_path / "sweep.csv"
        write_table(path, SWEEP, "csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("utilization_pct,measured_bandwidth_bps")
        assert "1500.500000" in lines[2]
        assert read_table(path)["utilization_pct"].tolist() == [0, 50, 100]

    def test_json_records(self, tmp_path):
        path = tmp_path / "sweep.json"
        write_table(path, SWEEP, "json")
        records = json.loads(path.read_text(encoding="utf-8"))
        assert records[2]["predicted_bandwidth_bps"] is None
        assert read_table(path)["measured_bandwidth_bps"].tolist() == [0.0, 1500.5, 2780.25]

    def test_unknown_format(self, tmp_path):
        with pytest.raises(RejectedInputError):
            write_table(tmp_path / "sweep.xml", SWEEP, "xml")


class TestFigures:
    def test_one_trace_per_column(self):
        figure = dataframe_to_figure(SWEEP, "utilization_pct", ["measured_bandwidth_bps", "predicted_bandwidth_bps"])
        assert [trace["name"] for trace in figure["data"]] == ["measured_bandwidth_bps", "predicted_bandwidth_bps"]
        assert figure["data"][1]["y"] == [0.0, 1490.0, None]
        assert figure["data"][0]["mode"] == "markers"

    def test_grouped_bars(self):
        figure = dataframe_to_figure(SWEEP, "utilization_pct", ["packet_rate_pps", "total_loss_fraction"], "bar")
        assert figure["layout"]["barmode"] == "group"
        assert {trace["type"] for trace in figure["data"]} == {"bar"}

    def test_layout_is_merged(self):
        figure = dataframe_to_figure(
            SWEEP, "utilization_pct", "packet_rate_pps", "line", layout={"margin": {"t": 10}, "title": "R"}
        )
        assert figure["layout"]["margin"] == {"l": 40, "r": 20, "t": 10, "b": 40}
        assert figure["layout"]["title"] == "R"

    def test_missing_column(self):
        with pytest.raises(RejectedInputError):
            dataframe_to_figure(SWEEP, "utilization_pct", "nope")

    def test_unknown_chart_type(self):
        with pytest.raises(RejectedInputError):
            dataframe_to_figure(SWEEP, "utilization_pct", "packet_rate_pps", chart_type="pie")

    def test_sweep_and_report_figures_are_json(self):
        documents = {"sweep": sweep_figures(SWEEP), "call": report_figures(sample_report())}
        decoded = json.loads(json.dumps(documents))
        assert set(decoded["sweep"]) == {"bandwidth", "packet_rate", "loss"}
        assert decoded["call"]["reference_size"]["data"][0]["y"] == [None, 33.333333333333336, 34.0]
