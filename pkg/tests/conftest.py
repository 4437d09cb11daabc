"""Shared fixtures: short calls, key material and tiny scenarios."""

from pathlib import Path

import pandas as pd
import pytest

from models.channel import BernoulliLoss, ChannelConfig, RateAdaptation
from models.metrics import MetricsReport
from models.scenario import ScenarioConfig, SecretSource
from models.som import SomMessage
from models.steg import KeyMaterial
from models.traffic import PacketRecord, TrafficProfile, Truth
from utils.traffic_model import generate_call

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def keys() -> KeyMaterial:
    return KeyMaterial.default()


@pytest.fixture(scope="session")
def cover_trace() -> list[PacketRecord]:
    """Two minutes of default traffic."""
    return generate_call(TrafficProfile(seed=11), 120.0)


def make_records(count: int, size: int = 40, interval_us: int = 20_000) -> list[PacketRecord]:
    """Fixed-size data packets at a constant interval, labeled Silence."""
    return [
        PacketRecord(
            index=index,
            timestamp=index * interval_us,
            message=SomMessage(id=index & 0xFFFF, fun=0x0D, payload=bytes(size - 3)),
            truth=Truth.SILENCE,
        )
        for index in range(count)
    ]


def small_scenario(**overrides) -> ScenarioConfig:
    """A 60 s call with a small random secret; keyword arguments replace fields."""
    fields = {
        "duration_s": 60.0,
        "profile": TrafficProfile(seed=5),
        "channel": ChannelConfig(loss=BernoulliLoss(0.0), seed=17),
        "secret": SecretSource(random_bytes=200_000),
        "adaptation": RateAdaptation(),
        "seed": 5,
    }
    fields.update(overrides)
    return ScenarioConfig(**fields)


def sample_report(**overrides) -> MetricsReport:
    """A plausible full-utilization report; keyword arguments replace fields."""
    fields = dict(
        duration_s=300.0,
        steg_bandwidth_bps=2781.0666666666666,
        offered_bandwidth_bps=2790.1,
        total_loss_fraction=0.4339,
        histogram_correlation=0.9987654321,
        classifier_precision=None,
        classifier_recall=0.99,
        silence_fraction=0.45,
        effective_utilization=1.0,
        packets_sent=15000,
        packets_delivered=15000,
        packets_embedded=6501,
        governor_suspensions=0,
        uniformity_pvalue=0.5,
        packet_rate_series=[50.0, 50.0, 24.0],
        reference_size_series=[None, 33.333333333333336, 34.0],
    )
    fields.update(overrides)
    return MetricsReport(**fields)


SWEEP = pd.DataFrame(
    {
        "utilization_pct": [0, 50, 100],
        "measured_bandwidth_bps": [0.0, 1500.5, 2780.25],
        "predicted_bandwidth_bps": [0.0, 1490.0, None],
        "packet_rate_pps": [50.0, 17.1, 17.8],
        "total_loss_fraction": [0.0, 0.5, 0.43],
    }
)
