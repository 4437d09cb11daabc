"""Scenario configuration and results."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .channel import ChannelConfig, RateAdaptation
from .classifier import ClassifierConfig, GovernorState, SizeClass
from .errors import ConfigError
from .steg import EmbedStats, KeyMaterial
from .traffic import PacketRecord, TrafficProfile, Truth


class Placement(str, Enum):
    """Where the covert endpoints sit on the call path."""

    END_TO_END = "end_to_end"
    THIRD_PARTY = "third_party"


@dataclass(frozen=True)
class SecretSource:
    """Secret byte stream: a file, or seeded random bytes when ``path`` is None."""

    path: str | None = None
    random_bytes: int = 262144

    def __post_init__(self) -> None:
        if self.path is None and self.random_bytes < 0:
            raise ConfigError(f"random_bytes must be >= 0, got {self.random_bytes}")


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to run one simulated call deterministically.

    Attributes:
        mode: Covert endpoint placement.
        utilization: Probability u that an identified silence packet is used.
        profile: Traffic generator parameters.
        channel: Hop between the covert endpoints (the whole path end to end).
        upstream: Caller-to-tap hop (third-party placement only).
        downstream: Tap-to-callee hop (third-party placement only).
        classifier: Sliding window parameters, shared by both covert endpoints.
        governor_threshold: Total-loss ceiling of the loss governor.
        adaptation: Overt sender's rate adaptation law.
        keys: Shared key material.
        duration_s: Call duration in seconds.
        secret: Secret byte source.
        seed: Master seed; utilization draws and random secrets derive from it.
        epoch: Keystream epoch (which 2^16-chunk counter block this call uses).
    """

    mode: Placement = Placement.END_TO_END
    utilization: float = 1.0
    profile: TrafficProfile = field(default_factory=TrafficProfile)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    upstream: ChannelConfig = field(default_factory=ChannelConfig)
    downstream: ChannelConfig = field(default_factory=ChannelConfig)
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    governor_threshold: float = 0.70
    adaptation: RateAdaptation = field(default_factory=RateAdaptation)
    keys: KeyMaterial = field(default_factory=KeyMaterial.default)
    duration_s: float = 300.0
    secret: SecretSource = field(default_factory=SecretSource)
    seed: int = 1
    epoch: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.utilization <= 1.0:
            raise ConfigError(f"utilization must be in [0, 1], got {self.utilization}")
        if self.duration_s <= 0:
            raise ConfigError(f"duration_s must be > 0, got {self.duration_s}")
        if not 0.0 < self.governor_threshold <= 1.0:
            raise ConfigError(f"governor threshold must be in (0, 1], got {self.governor_threshold}")
        if not 0 <= self.epoch < 2**48:
            raise ConfigError(f"epoch must fit in 48 bits, got {self.epoch}")
        if self.mode is Placement.END_TO_END and not (self.upstream.is_lossless and self.downstream.is_lossless):
            raise ConfigError("upstream/downstream hops only apply to the third_party mode")

    def to_dict(self) -> dict[str, Any]:
        return {
            "mode": self.mode.value,
            "utilization": self.utilization,
            "duration_s": self.duration_s,
            "seed": self.seed,
            "epoch": self.epoch,
            "profile": self.profile.to_dict(),
            "classifier": self.classifier.to_dict(),
            "governor": {"threshold": self.governor_threshold},
            "channel": self.channel.to_dict(),
            "upstream": self.upstream.to_dict(),
            "downstream": self.downstream.to_dict(),
            "adaptation": self.adaptation.to_dict(),
            "keys": self.keys.to_dict(),
            "secret": {"path": self.secret.path, "random_bytes": self.secret.random_bytes},
        }


@dataclass(frozen=True, slots=True)
class TimelineRow:
    """Per-second counters of one call."""

    second: int
    sent: int
    delivered: int
    unusable: int
    embedded: int
    packet_rate: int
    size_factor: float
    reference_size: float | None
    governor: GovernorState


@dataclass
class ScenarioResult:
    """Outcome of one simulated call.

    ``generated`` is the cover trace, ``sent`` the trace leaving the covert
    transmitter, ``delivered`` what reaches the overt receiver.
    """

    config: ScenarioConfig
    generated: list[PacketRecord]
    sent: list[PacketRecord]
    delivered: list[PacketRecord]
    secret: bytes
    extracted: bytes
    bitmap: list[bool]
    delivered_secret_bytes: int
    stats: EmbedStats
    classified: list[tuple[Truth, SizeClass]]
    timeline: list[TimelineRow]
    unusable: int
    chunks_extracted: int
    governor_suspensions: int = 0

    @property
    def duration_s(self) -> float:
        return self.config.duration_s

    @property
    def total_loss_fraction(self) -> float:
        """Fraction of sent packets unusable by the overt receiver (dropped or embedded)."""
        if not self.generated:
            return 0.0
        return self.unusable / len(self.generated)
