"""End-to-end checks against the measured operating points of the original experiments.

Every test here runs full-length calls; the module is marked slow.
"""

from collections import Counter
from dataclasses import replace

import pytest

from models.channel import BernoulliLoss, ChannelConfig, RateAdaptation
from models.classifier import SizeClass
from models.scenario import ScenarioConfig, ScenarioResult
from models.traffic import TrafficProfile, Truth
from utils.analysis import build_report, byte_histogram, measured_bandwidth, pearson, predicted_bandwidth
from utils.config import load_scenario, reseed
from utils.scenario import run_scenario
from utils.silence_classifier import SilenceClassifier, score_classifier
from utils.som_codec import is_data_fun
from utils.trace_io import record_to_line
from utils.traffic_model import generate_call

from conftest import CONFIGS

pytestmark = pytest.mark.slow

# utilization % -> (bandwidth kbps, silence reference size B, packet rate pps)
MEASURED = {
    20: (1.37, 35.95, 49.14),
    30: (1.83, 33.98, 45.61),
    40: (1.52, 35.23, 23.68),
    50: (1.50, 48.98, 17.08),
    60: (1.81, 48.42, 16.97),
    80: (2.47, 46.10, 17.17),
    100: (2.78, 43.82, 17.84),
}
TIGHT = (20, 30, 50, 60, 100)


def lossy(p: float) -> ScenarioConfig:
    return replace(ScenarioConfig(), channel=ChannelConfig(loss=BernoulliLoss(p), seed=101))


@pytest.fixture(scope="module")
def full_use() -> ScenarioResult:
    return run_scenario(ScenarioConfig())


@pytest.fixture(scope="module")
def loss_sweep() -> dict[float, ScenarioResult]:
    return {p: run_scenario(lossy(p)) for p in (0.0, 0.2, 0.4, 0.5, 0.6)}


class TestBandwidthModel:
    @pytest.mark.parametrize("pct", sorted(MEASURED))
    def test_formula_reproduces_measurements(self, pct):
        kbps, size, rate = MEASURED[pct]
        predicted = predicted_bandwidth(pct / 100, 0.45, rate, size) / 1000
        tolerance = 0.10 if pct in TIGHT else 0.25
        assert predicted == pytest.approx(kbps, rel=tolerance)


class TestClosedLoopBandwidth:
    def test_full_utilization(self, full_use):
        assert 2500 <= measured_bandwidth(full_use) <= 3100

    def test_thirty_percent_utilization(self):
        result = run_scenario(replace(ScenarioConfig(), utilization=0.3))
        assert 1600 <= measured_bandwidth(result) <= 2000

    def test_adaptation_settles_on_the_low_rate(self, full_use):
        rates = Counter(row.packet_rate for row in full_use.timeline[-100:])
        assert rates.most_common(1)[0][0] == 17


class TestUndetectability:
    def test_histograms_stay_correlated(self):
        cfg = replace(ScenarioConfig(), adaptation=RateAdaptation(enabled=False))
        result = run_scenario(cfg)
        assert len(result.sent) >= 10_000
        assert result.stats.embedded > 0
        assert pearson(byte_histogram(result.generated), byte_histogram(result.sent)) >= 0.95


class TestGovernorCeiling:
    @pytest.mark.parametrize("p", [0.0, 0.2, 0.4, 0.5, 0.6])
    def test_total_loss_stays_under_ceiling(self, loss_sweep, p):
        result = loss_sweep[p]
        window_share = max(
            sum(row.sent for row in result.timeline[start : start + 10]) for start in range(0, 300, 10)
        ) / len(result.generated)
        assert result.total_loss_fraction <= 0.70 + window_share

    @pytest.mark.parametrize("p", [0.0, 0.2, 0.4, 0.5, 0.6])
    def test_total_loss_matches_drop_and_use(self, loss_sweep, p):
        result = loss_sweep[p]
        used = result.stats.embedded / len(result.generated)
        assert result.total_loss_fraction == pytest.approx(1 - (1 - p) * (1 - used), abs=0.02)


class TestClassifierQuality:
    def test_pooled_precision_and_recall(self):
        pairs = []
        for seed in range(20):
            classifier = SilenceClassifier()
            for record in generate_call(TrafficProfile(seed=seed), 300.0):
                if is_data_fun(record.message.fun):
                    pairs.append((record.truth, classifier.classify_and_observe(record.size, record.timestamp)))
        precision, recall = score_classifier(pairs)
        assert precision >= 0.99
        assert recall >= 0.99


class TestIntegrity:
    def test_lossless_round_trip_is_bit_exact(self, full_use):
        assert len(full_use.secret) > 50_000
        assert full_use.extracted == full_use.secret
        assert all(full_use.bitmap)


def _modified_verdicts(result: ScenarioResult) -> list[tuple[Truth, SizeClass]]:
    """(truth, transmitter verdict) of every packet the transmitter changed."""
    originals = {record.index: record for record in result.generated}
    data_sent = [record for record in result.sent if is_data_fun(record.message.fun)]
    assert len(data_sent) == len(result.classified)
    return [
        (truth, verdict)
        for record, (truth, verdict) in zip(data_sent, result.classified)
        if record != originals[record.index]
    ]


class TestFidelity:
    def test_only_silence_verdicts_are_modified(self, full_use, loss_sweep):
        for result in (full_use, *loss_sweep.values()):
            modified = _modified_verdicts(result)
            assert len(modified) == result.stats.embedded
            assert all(verdict is SizeClass.SILENCE for _, verdict in modified)

    def test_voice_labeled_packets_are_never_touched(self, full_use, loss_sweep):
        for result in (full_use, *loss_sweep.values()):
            touched = sum(1 for truth, _ in _modified_verdicts(result) if truth is Truth.VOICE)
            assert touched == 0

    @pytest.mark.parametrize("utilization", [0.5, 1.0])
    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_voice_stays_untouched_across_seeds(self, seed, utilization):
        result = run_scenario(reseed(replace(ScenarioConfig(), utilization=utilization), seed))
        assert result.stats.embedded > 0
        assert not [truth for truth, _ in _modified_verdicts(result) if truth is Truth.VOICE]

    def test_size_multiset_is_preserved(self, full_use, loss_sweep):
        for result in (full_use, *loss_sweep.values()):
            assert Counter(record.size for record in result.sent) == Counter(
                record.size for record in result.generated
            )


class TestDeterminism:
    def test_bursty_third_party_call_repeats_exactly(self):
        cfg = load_scenario(CONFIGS / "third_party_bursty.yaml")
        first, second = run_scenario(cfg), run_scenario(cfg)
        assert [record_to_line(record) for record in first.delivered] == [
            record_to_line(record) for record in second.delivered
        ]
        assert build_report(first) == build_report(second)
        assert first.extracted == second.extracted
