from collections import Counter
from dataclasses import replace

import pytest

from conftest import small_scenario
from models.channel import BernoulliLoss, ChannelConfig, RateAdaptation
from models.classifier import GovernorState
from models.errors import ConfigError
from models.scenario import Placement, ScenarioConfig, SecretSource
from utils.config import reseed
from utils.scenario import CallPath, load_secret, run_scenario
from utils.seeding import Stream, derive_seed


def lossy(p: float, seed: int = 17) -> ChannelConfig:
    return ChannelConfig(loss=BernoulliLoss(p), seed=seed)


class TestLoadSecret:
    def test_random_secret_follows_master_seed(self):
        source = SecretSource(random_bytes=64)
        assert load_secret(source, 3) == load_secret(source, 3)
        assert load_secret(source, 3) != load_secret(source, 4)
        assert len(load_secret(source, 3)) == 64

    def test_reads_file(self, tmp_path):
        path = tmp_path / "secret.bin"
        path.write_bytes(b"attack at dawn")
        assert load_secret(SecretSource(path=str(path)), 1) == b"attack at dawn"


class TestSeeding:
    def test_streams_are_independent(self):
        seeds = {derive_seed(1, stream) for stream in Stream}
        assert len(seeds) == len(Stream)

    def test_derivation_is_stable(self):
        assert derive_seed(1, Stream.CHANNEL) == derive_seed(1, Stream.CHANNEL)


class TestCallPath:
    def test_empty_path_is_identity(self):
        path = CallPath([])
        assert path.push("packet") == ["packet"]
        assert path.flush() == []


# ---------------------------------------------------------------------------
# Whole calls
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def full_use():
    return run_scenario(small_scenario())


class TestRunScenario:
    def test_zero_utilization_is_identity(self):
        result = run_scenario(small_scenario(utilization=0.0))
        assert result.sent == result.generated
        assert result.delivered == result.generated
        assert result.extracted == b""
        assert result.bitmap == []
        assert result.total_loss_fraction == 0.0

    def test_lossless_call_recovers_the_secret(self, full_use):
        assert full_use.stats.embedded > 0
        assert len(full_use.secret) > 0
        assert full_use.extracted == full_use.secret
        assert all(full_use.bitmap)
        assert full_use.delivered_secret_bytes == len(full_use.secret)

    def test_embedding_preserves_sizes(self, full_use):
        assert len(full_use.sent) == len(full_use.generated)
        for sent, cover in zip(full_use.sent, full_use.generated):
            assert sent.index == cover.index
            assert sent.size == cover.size
            assert sent.timestamp == cover.timestamp
        modified = sum(1 for sent, cover in zip(full_use.sent, full_use.generated) if sent != cover)
        assert modified == full_use.stats.embedded

    def test_same_config_same_result(self):
        cfg = small_scenario(channel=lossy(0.1), duration_s=30.0)
        assert run_scenario(cfg) == run_scenario(cfg)

    def test_timeline_adds_up(self):
        result = run_scenario(small_scenario(channel=lossy(0.1)))
        assert [row.second for row in result.timeline] == list(range(60))
        assert sum(row.sent for row in result.timeline) == len(result.generated)
        assert sum(row.delivered for row in result.timeline) == len(result.delivered)
        assert sum(row.embedded for row in result.timeline) == result.stats.embedded
        assert sum(row.unusable for row in result.timeline) == result.unusable
        assert all(row.reference_size is None for row in result.timeline[:9])

    def test_rate_adapts_to_embedding_losses(self, full_use):
        rates = [row.packet_rate for row in full_use.timeline]
        assert rates[0] == 50
        assert min(rates) < 50

    def test_rate_is_fixed_without_adaptation(self):
        result = run_scenario(small_scenario(adaptation=RateAdaptation(enabled=False)))
        assert {row.packet_rate for row in result.timeline} == {50}
        assert abs(len(result.generated) - 3000) <= 1

    def test_loss_follows_drop_and_use_probabilities(self):
        p = 0.3
        result = run_scenario(small_scenario(channel=lossy(p), duration_s=120.0))
        used = result.stats.embedded / len(result.generated)
        assert result.total_loss_fraction == pytest.approx(1 - (1 - p) * (1 - used), abs=0.025)

    def test_lost_chunks_leave_holes(self):
        result = run_scenario(small_scenario(channel=lossy(0.2)))
        assert False in result.bitmap
        assert 0 < result.delivered_secret_bytes < len(result.secret)
        assert len(result.extracted) == len(result.secret)

    @pytest.mark.parametrize("seed", range(1, 9))
    def test_bitmap_covers_every_chunk_sent(self, seed):
        result = run_scenario(reseed(small_scenario(channel=lossy(0.5)), seed))
        assert len(result.bitmap) == result.stats.embedded
        delivered = {record.index for record in result.delivered}
        carriers = [sent.index for sent, cover in zip(result.sent, result.generated) if sent != cover]
        # Carriers are in seq order, so a lost carrier must be a false bit
        assert not any(flag for flag, index in zip(result.bitmap, carriers) if index not in delivered)


class TestPlacement:
    def test_third_party_with_lossless_taps_matches_end_to_end(self):
        end_to_end = small_scenario(channel=lossy(0.1), duration_s=40.0)
        third_party = replace(end_to_end, mode=Placement.THIRD_PARTY)
        first, second = run_scenario(end_to_end), run_scenario(third_party)
        assert first.extracted == second.extracted
        assert first.delivered == second.delivered
        assert first.stats == second.stats

    def test_upstream_losses_hit_the_overt_call(self):
        cfg = small_scenario(
            mode=Placement.THIRD_PARTY,
            upstream=lossy(0.05, seed=3),
            downstream=lossy(0.05, seed=4),
        )
        result = run_scenario(cfg)
        assert len(result.sent) < len(result.generated)
        assert len(result.delivered) < len(result.sent)
        assert result.delivered_secret_bytes > 0

    def test_end_to_end_rejects_tap_hops(self):
        with pytest.raises(ConfigError):
            ScenarioConfig(upstream=lossy(0.1))


class TestGovernor:
    @pytest.mark.slow
    def test_moderate_loss_stays_under_ceiling(self):
        result = run_scenario(small_scenario(channel=lossy(0.5), duration_s=120.0))
        assert result.total_loss_fraction <= 0.70

    @pytest.mark.slow
    def test_heavy_loss_triggers_suspension(self):
        governed = run_scenario(small_scenario(channel=lossy(0.6), duration_s=120.0))
        ungoverned = run_scenario(small_scenario(channel=lossy(0.6), duration_s=120.0, governor_threshold=1.0))
        assert governed.governor_suspensions >= 1
        assert ungoverned.governor_suspensions == 0
        assert governed.total_loss_fraction < ungoverned.total_loss_fraction - 0.03
        states = Counter(row.governor for row in governed.timeline)
        assert states[GovernorState.SUSPENDED] >= 10
