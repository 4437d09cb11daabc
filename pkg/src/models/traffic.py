"""Traffic model types: call profiles and labeled packet records."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .errors import ConfigError
from .som import SomMessage

# Packet-rate tiers observed for UDP voice calls
PACKET_RATES = (16, 33, 50)


class Truth(str, Enum):
    """Ground-truth label attached to every generated packet."""

    VOICE = "voice"
    SILENCE = "silence"
    SIGNALING = "signaling"


@dataclass(frozen=True)
class SizeDistribution:
    """Clipped normal distribution of total datagram sizes, in bytes.

    Attributes:
        mean: Mean datagram size.
        stddev: Standard deviation.
        min: Lower clip bound (must leave room for a 1-byte payload).
        max: Upper clip bound.
    """

    mean: float
    stddev: float
    min: int
    max: int

    def __post_init__(self) -> None:
        if self.stddev < 0:
            raise ConfigError(f"stddev must be >= 0, got {self.stddev}")
        if self.min < 4:
            raise ConfigError(f"min size must be >= 4 bytes, got {self.min}")
        if self.max < self.min:
            raise ConfigError(f"max ({self.max}) must be >= min ({self.min})")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SizeDistribution":
        return cls(
            mean=float(data["mean"]),
            stddev=float(data["stddev"]),
            min=int(data["min"]),
            max=int(data["max"]),
        )

    def to_dict(self) -> dict[str, Any]:
        return {"mean": self.mean, "stddev": self.stddev, "min": self.min, "max": self.max}


DEFAULT_SILENCE_SIZE = SizeDistribution(mean=38.0, stddev=3.0, min=25, max=60)
DEFAULT_VOICE_SIZE = SizeDistribution(mean=110.0, stddev=25.0, min=60, max=220)


@dataclass(frozen=True)
class TrafficProfile:
    """Parameters of the synthetic call generator.

    ``mean_silence_s`` may be left as None, in which case it is derived from
    ``speech_ratio`` and ``mean_talkspurt_s``.

    Attributes:
        speech_ratio: Long-run fraction of time with active speech.
        mean_talkspurt_s: Mean talkspurt duration in seconds.
        mean_silence_s: Mean silence duration in seconds.
        packet_rate: Nominal packets per second (16, 33 or 50).
        silence_size: Datagram size distribution during silence.
        voice_size: Datagram size distribution during talkspurts.
        signaling_fraction: Probability that a tick carries a signaling message.
        ratio_block_s: Length of the ratio-locked blocks (0 disables locking).
        seed: 64-bit generator seed.
    """

    speech_ratio: float = 0.55
    mean_talkspurt_s: float = 3.0
    mean_silence_s: float | None = None
    packet_rate: int = 50
    silence_size: SizeDistribution = field(default_factory=lambda: DEFAULT_SILENCE_SIZE)
    voice_size: SizeDistribution = field(default_factory=lambda: DEFAULT_VOICE_SIZE)
    signaling_fraction: float = 0.005
    ratio_block_s: float = 10.0
    seed: int = 1

    def __post_init__(self) -> None:
        if not 0.0 < self.speech_ratio < 1.0:
            raise ConfigError(f"speech_ratio must be in (0, 1), got {self.speech_ratio}")
        if self.mean_talkspurt_s <= 0:
            raise ConfigError(f"mean_talkspurt_s must be > 0, got {self.mean_talkspurt_s}")
        if self.mean_silence_s is None:
            derived = self.mean_talkspurt_s * (1.0 - self.speech_ratio) / self.speech_ratio
            object.__setattr__(self, "mean_silence_s", derived)
        elif self.mean_silence_s <= 0:
            raise ConfigError(f"mean_silence_s must be > 0, got {self.mean_silence_s}")
        implied = self.mean_talkspurt_s / (self.mean_talkspurt_s + self.mean_silence_s)
        if abs(implied - self.speech_ratio) > 1e-9:
            raise ConfigError(
                f"speech_ratio {self.speech_ratio} disagrees with segment means (implied {implied:.9f})"
            )
        if self.packet_rate not in PACKET_RATES:
            raise ConfigError(f"packet_rate must be one of {PACKET_RATES}, got {self.packet_rate}")
        if not 0.0 <= self.signaling_fraction < 1.0:
            raise ConfigError(f"signaling_fraction must be in [0, 1), got {self.signaling_fraction}")
        if self.ratio_block_s < 0:
            raise ConfigError(f"ratio_block_s must be >= 0, got {self.ratio_block_s}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "TrafficProfile":
        """Build a profile from a parsed config mapping; missing keys take defaults."""
        known = {
            "speech_ratio",
            "mean_talkspurt_s",
            "mean_silence_s",
            "packet_rate",
            "silence_size",
            "voice_size",
            "signaling_fraction",
            "ratio_block_s",
            "seed",
        }
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown profile keys: {sorted(unknown)}")
        kwargs: dict[str, Any] = dict(data)
        for key in ("silence_size", "voice_size"):
            if key in kwargs:
                kwargs[key] = SizeDistribution.from_dict(kwargs[key])
        return cls(**kwargs)

    def to_dict(self) -> dict[str, Any]:
        return {
            "speech_ratio": self.speech_ratio,
            "mean_talkspurt_s": self.mean_talkspurt_s,
            "mean_silence_s": self.mean_silence_s,
            "packet_rate": self.packet_rate,
            "silence_size": self.silence_size.to_dict(),
            "voice_size": self.voice_size.to_dict(),
            "signaling_fraction": self.signaling_fraction,
            "ratio_block_s": self.ratio_block_s,
            "seed": self.seed,
        }


@dataclass(frozen=True, slots=True)
class PacketRecord:
    """A timestamped datagram with its ground-truth label.

    Attributes:
        index: Monotone sequence number assigned by the generator.
        timestamp: Microseconds since call start.
        message: The SoM datagram.
        truth: Ground-truth label; never inferred from size.
    """

    index: int
    timestamp: int
    message: SomMessage
    truth: Truth

    @property
    def size(self) -> int:
        return self.message.size
