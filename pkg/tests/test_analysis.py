import numpy as np
import pytest

from conftest import make_records, small_scenario
from models.channel import RateAdaptation
from models.errors import RejectedInputError, UndefinedStatisticError
from models.metrics import ByteHistogram
from models.som import SomMessage
from models.traffic import Truth
from utils.analysis import (
    FUN_PEAKS,
    SWEEP_COLUMNS,
    analyze_traces,
    build_report,
    byte_histogram,
    byte_uniformity_pvalue,
    measured_bandwidth,
    pearson,
    predicted_bandwidth,
    run_sweep,
    timeline_frame,
)
from utils.scenario import run_scenario

# ---------------------------------------------------------------------------
# Byte histograms
# ---------------------------------------------------------------------------


class TestByteHistogram:
    def test_counts_header_and_payload(self):
        histogram = byte_histogram([SomMessage(id=0x0000, fun=0x0D, payload=b"\xff")])
        assert histogram.counts[0x00] == 2
        assert histogram.counts[0x0D] == 1
        assert histogram.counts[0xFF] == 1
        assert histogram.total == 4

    def test_empty_trace_is_undefined(self):
        with pytest.raises(UndefinedStatisticError):
            byte_histogram([])

    def test_needs_256_bins(self):
        with pytest.raises(RejectedInputError):
            ByteHistogram(counts=(1, 2, 3))

    def test_normalized_sums_to_one(self, cover_trace):
        assert byte_histogram(cover_trace).normalized.sum() == pytest.approx(1.0, abs=1e-9)

    def test_fun_values_stand_out(self, cover_trace):
        """A datagram averages ~78 bytes: one Fun byte and ~77 near-uniform bytes.

        Each of the 256 bins then gets ~77/256 = 0.30 counts per datagram, and each of
        the 8 data Fun values adds 1/8 = 0.125 to its own bin, so a peak sits at about
        (0.30 + 0.125) / 0.30 = 1.4x the median bin. On a two-minute trace a bin holds
        ~1800 counts, so 1.25x is several standard deviations below the expected ratio.
        """
        counts = np.asarray(byte_histogram(cover_trace).counts)
        others = np.delete(counts, list(FUN_PEAKS))
        median = np.median(others)
        for fun in FUN_PEAKS:
            assert counts[fun] >= 1.25 * median

    def test_other_bins_are_uniform(self, cover_trace):
        histogram = byte_histogram(cover_trace)
        assert byte_uniformity_pvalue(histogram) > 0.001
        assert byte_uniformity_pvalue(histogram, exclude=()) < 1e-6


class TestPearson:
    def test_self_correlation_is_one(self, cover_trace):
        histogram = byte_histogram(cover_trace)
        assert pearson(histogram, histogram) == pytest.approx(1.0, abs=1e-12)

    def test_zero_variance_is_undefined(self):
        flat = ByteHistogram(counts=(1,) * 256)
        peaked = ByteHistogram(counts=(5,) + (1,) * 255)
        with pytest.raises(UndefinedStatisticError):
            pearson(flat, peaked)

    def test_anticorrelated(self):
        rising = ByteHistogram(counts=tuple(range(256)))
        falling = ByteHistogram(counts=tuple(range(255, -1, -1)))
        assert pearson(rising, falling) == pytest.approx(-1.0)


# ---------------------------------------------------------------------------
# Bandwidth model
# ---------------------------------------------------------------------------


class TestPredictedBandwidth:
    @pytest.mark.parametrize(
        "u, s, rate, size, expected",
        [
            (1.0, 0.45, 17.84, 43.82, 2814.3),
            (0.5, 0.45, 17.08, 48.98, 1505.8),
            (0.3, 0.45, 45.61, 33.98, 1673.7),
            (0.0, 0.45, 50.0, 38.0, 0.0),
        ],
    )
    def test_formula(self, u, s, rate, size, expected):
        assert predicted_bandwidth(u, s, rate, size) == pytest.approx(expected, abs=1.0)

    @pytest.mark.parametrize("args", [(1.1, 0.45, 50, 38), (0.5, -0.1, 50, 38), (0.5, 0.45, 0, 38), (0.5, 0.45, 50, 0)])
    def test_rejects_bad_arguments(self, args):
        with pytest.raises(RejectedInputError):
            predicted_bandwidth(*args)


class TestMeasuredBandwidth:
    def test_matches_the_model_on_a_lossless_fixed_rate_call(self):
        """Every silence packet after warm-up carries its payload minus the 2-byte seq prefix."""
        result = run_scenario(small_scenario(adaptation=RateAdaptation(enabled=False)))
        warm_up_s = 10
        active_s = result.duration_s - warm_up_s
        data = [
            record
            for record in result.generated
            if record.truth is not Truth.SIGNALING and record.timestamp >= warm_up_s * 1_000_000
        ]
        silence = [record for record in data if record.truth is Truth.SILENCE]
        carried = float(np.mean([record.size for record in silence])) - 3 - 2
        predicted = predicted_bandwidth(1.0, len(silence) / len(data), len(data) / active_s, carried)
        measured = measured_bandwidth(result) * result.duration_s / active_s
        assert measured == pytest.approx(predicted, rel=0.02)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


class TestBuildReport:
    @pytest.fixture(scope="class")
    def result(self):
        return run_scenario(small_scenario(utilization=0.5))

    def test_counters(self, result):
        report = build_report(result)
        assert report.packets_sent == len(result.generated)
        assert report.packets_delivered == len(result.delivered)
        assert report.packets_embedded == result.stats.embedded
        assert report.steg_bandwidth_bps == pytest.approx(result.delivered_secret_bytes * 8 / 60.0)
        assert report.effective_utilization == pytest.approx(0.5, abs=0.08)

    def test_stego_histogram_stays_close_to_cover(self, result):
        report = build_report(result)
        assert report.histogram_correlation > 0.9
        assert report.classifier_precision > 0.9
        assert report.silence_fraction == pytest.approx(0.45, abs=0.02)

    def test_series_follow_the_timeline(self, result):
        report = build_report(result)
        assert len(report.packet_rate_series) == len(result.timeline) == 60
        assert report.reference_size_series[0] is None

    def test_timeline_frame(self, result):
        frame = timeline_frame(result)
        assert len(frame) == 60
        assert frame["sent"].sum() == len(result.generated)
        assert set(frame["governor"]) <= {"active", "suspended"}


class TestAnalyzeTraces:
    def test_empty_cover_is_undefined(self):
        with pytest.raises(UndefinedStatisticError):
            analyze_traces([])

    def test_cover_only(self, cover_trace):
        report = analyze_traces(cover_trace)
        assert report.total_loss_fraction == 0.0
        assert report.histogram_correlation == pytest.approx(1.0)
        assert report.duration_s == 120.0
        assert report.packets_embedded == 0

    def test_extracts_from_stego_trace(self, keys):
        result = run_scenario(small_scenario(duration_s=40.0))
        report = analyze_traces(result.generated, result.sent, keys=keys)
        assert report.packets_embedded == result.stats.embedded
        assert report.total_loss_fraction == pytest.approx(result.stats.embedded / len(result.generated))
        assert report.steg_bandwidth_bps > 0

    def test_constant_sizes(self):
        report = analyze_traces(make_records(600))
        assert report.classifier_precision == 1.0
        assert report.silence_fraction == 1.0


# ---------------------------------------------------------------------------
# Sweep
# ---------------------------------------------------------------------------


class TestSweep:
    @pytest.mark.slow
    def test_one_row_per_grid_point(self):
        frame = run_sweep(small_scenario(duration_s=30.0), grid=(0, 50, 100))
        assert list(frame.columns) == list(SWEEP_COLUMNS)
        assert list(frame["utilization_pct"]) == [0, 50, 100]
        assert frame["measured_bandwidth_bps"].iloc[0] == 0.0
        assert frame["measured_bandwidth_bps"].iloc[2] > frame["measured_bandwidth_bps"].iloc[1] > 0

    def test_rejects_grid_outside_percent_range(self):
        with pytest.raises(RejectedInputError):
            run_sweep(small_scenario(), grid=(0, 120))
