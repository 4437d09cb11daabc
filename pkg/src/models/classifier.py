"""Configuration and outcome types for the sliding-window silence classifier."""

from dataclasses import dataclass
from enum import Enum
from typing import Any

from .errors import ConfigError


class SizeClass(str, Enum):
    """Classifier verdict for one packet."""

    SILENCE = "silence"
    VOICE = "voice"
    UNKNOWN = "unknown"


class GovernorState(str, Enum):
    ACTIVE = "active"
    SUSPENDED = "suspended"


class GovernorDecision(str, Enum):
    ALLOW = "allow"
    SUSPEND = "suspend"


@dataclass(frozen=True)
class ClassifierConfig:
    """Sliding time window parameters.

    Attributes:
        window_s: Window length w in whole seconds.
        delta: Size tolerance above the reference, in bytes.
        k_lowest: Number of per-second minima averaged into the reference.
    """

    window_s: int = 10
    delta: int = 20
    k_lowest: int = 3

    def __post_init__(self) -> None:
        if self.window_s < 3:
            raise ConfigError(f"window_s must be >= 3, got {self.window_s}")
        if self.delta < 0:
            raise ConfigError(f"delta must be >= 0, got {self.delta}")
        if self.k_lowest != 3:
            raise ConfigError(f"k_lowest is fixed at 3, got {self.k_lowest}")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ClassifierConfig":
        unknown = set(data) - {"window_s", "delta", "k_lowest"}
        if unknown:
            raise ConfigError(f"unknown classifier keys: {sorted(unknown)}")
        return cls(**{key: int(value) for key, value in data.items()})

    def to_dict(self) -> dict[str, Any]:
        return {"window_s": self.window_s, "delta": self.delta, "k_lowest": self.k_lowest}
