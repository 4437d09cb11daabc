"""Channel and overt-application adaptation configuration."""

import math
from dataclasses import dataclass, field
from typing import Any

from .errors import ConfigError


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f"{name} must be in [0, 1], got {value}")


@dataclass(frozen=True)
class BernoulliLoss:
    """Independent drops with probability ``p``."""

    p: float = 0.0

    def __post_init__(self) -> None:
        _check_probability("p", self.p)


@dataclass(frozen=True)
class GilbertElliottLoss:
    """Two-state Markov loss process (Good/Bad)."""

    p_good_to_bad: float = 0.02
    p_bad_to_good: float = 0.1
    loss_good: float = 0.05
    loss_bad: float = 0.5

    def __post_init__(self) -> None:
        for name in ("p_good_to_bad", "p_bad_to_good", "loss_good", "loss_bad"):
            _check_probability(name, getattr(self, name))


LossModel = BernoulliLoss | GilbertElliottLoss


def loss_model_from_dict(data: dict[str, Any]) -> LossModel:
    """Parse a ``loss`` mapping: ``{model: bernoulli, p: ...}`` or ``{model: gilbert_elliott, ...}``."""
    params = dict(data)
    model = params.pop("model", "bernoulli")
    try:
        if model == "bernoulli":
            return BernoulliLoss(**{key: float(value) for key, value in params.items()})
        if model == "gilbert_elliott":
            return GilbertElliottLoss(**{key: float(value) for key, value in params.items()})
    except TypeError as exc:
        raise ConfigError(f"bad parameters for loss model {model!r}: {exc}") from exc
    raise ConfigError(f"unknown loss model: {model!r}")


def loss_model_to_dict(model: LossModel) -> dict[str, Any]:
    if isinstance(model, BernoulliLoss):
        return {"model": "bernoulli", "p": model.p}
    return {
        "model": "gilbert_elliott",
        "p_good_to_bad": model.p_good_to_bad,
        "p_bad_to_good": model.p_bad_to_good,
        "loss_good": model.loss_good,
        "loss_bad": model.loss_bad,
    }


@dataclass(frozen=True)
class ChannelConfig:
    """One simulated UDP hop.

    Attributes:
        loss: Loss process.
        reorder: Probability that a packet swaps places with its successor (0 disables).
        seed: Seed of the hop's random stream.
    """

    loss: LossModel = field(default_factory=BernoulliLoss)
    reorder: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        _check_probability("reorder", self.reorder)

    @property
    def is_lossless(self) -> bool:
        return isinstance(self.loss, BernoulliLoss) and self.loss.p == 0.0 and self.reorder == 0.0

    @classmethod
    def from_dict(cls, data: dict[str, Any], default_seed: int = 0) -> "ChannelConfig":
        unknown = set(data) - {"loss", "reorder", "seed"}
        if unknown:
            raise ConfigError(f"unknown channel keys: {sorted(unknown)}")
        return cls(
            loss=loss_model_from_dict(data.get("loss", {})),
            reorder=float(data.get("reorder", 0.0)),
            seed=int(data.get("seed", default_seed)),
        )

    def to_dict(self) -> dict[str, Any]:
        return {"loss": loss_model_to_dict(self.loss), "reorder": self.reorder, "seed": self.seed}


@dataclass(frozen=True)
class AdaptationTier:
    """Operating point used while the observed loss is below ``below``."""

    below: float
    packet_rate: int
    size_factor: float

    def __post_init__(self) -> None:
        if not 16 <= self.packet_rate <= 50:
            raise ConfigError(f"tier packet_rate must be in [16, 50], got {self.packet_rate}")
        if self.size_factor < 1.0:
            raise ConfigError(f"tier size_factor must be >= 1, got {self.size_factor}")


# Fitted to the measured operating points: ~50 pps unloaded, ~24 pps in transition,
# ~17 pps with ~29% larger datagrams under heavy loss.
DEFAULT_TIERS: tuple[AdaptationTier, ...] = (
    AdaptationTier(below=0.15, packet_rate=50, size_factor=1.00),
    AdaptationTier(below=0.35, packet_rate=24, size_factor=1.00),
    AdaptationTier(below=math.inf, packet_rate=17, size_factor=1.29),
)


@dataclass(frozen=True)
class RateAdaptation:
    """Overt sender's reaction to observed loss.

    Attributes:
        enabled: When False the call keeps the profile's packet rate and size.
        tiers: Tiers ordered by increasing ``below`` threshold; the last one must be unbounded.
        period_s: Seconds between re-evaluations.
        smoothing: EWMA weight of the newest period's loss.
        shrink_hysteresis: Extra margin below a tier boundary the smoothed loss must
            reach before the sender goes back to smaller datagrams.
    """

    enabled: bool = True
    tiers: tuple[AdaptationTier, ...] = DEFAULT_TIERS
    period_s: int = 10
    smoothing: float = 0.3
    shrink_hysteresis: float = 0.05

    def __post_init__(self) -> None:
        if not self.tiers:
            raise ConfigError("adaptation needs at least one tier")
        thresholds = [tier.below for tier in self.tiers]
        if thresholds != sorted(thresholds) or len(set(thresholds)) != len(thresholds):
            raise ConfigError(f"tier thresholds must be strictly increasing, got {thresholds}")
        if not math.isinf(thresholds[-1]):
            raise ConfigError("the last adaptation tier must be unbounded")
        if self.period_s < 1:
            raise ConfigError(f"period_s must be >= 1, got {self.period_s}")
        if not 0.0 < self.smoothing <= 1.0:
            raise ConfigError(f"smoothing must be in (0, 1], got {self.smoothing}")
        if not 0.0 <= self.shrink_hysteresis < 1.0:
            raise ConfigError(f"shrink_hysteresis must be in [0, 1), got {self.shrink_hysteresis}")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RateAdaptation":
        unknown = set(data) - {"enabled", "tiers", "period_s", "smoothing", "shrink_hysteresis"}
        if unknown:
            raise ConfigError(f"unknown adaptation keys: {sorted(unknown)}")
        tiers = DEFAULT_TIERS
        if "tiers" in data:
            tiers = tuple(
                AdaptationTier(
                    below=math.inf if tier.get("below") is None else float(tier["below"]),
                    packet_rate=int(tier["packet_rate"]),
                    size_factor=float(tier.get("size_factor", 1.0)),
                )
                for tier in data["tiers"]
            )
        return cls(
            enabled=bool(data.get("enabled", True)),
            tiers=tiers,
            period_s=int(data.get("period_s", 10)),
            smoothing=float(data.get("smoothing", 0.3)),
            shrink_hysteresis=float(data.get("shrink_hysteresis", 0.05)),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "enabled": self.enabled,
            "tiers": [
                {
                    "below": None if math.isinf(tier.below) else tier.below,
                    "packet_rate": tier.packet_rate,
                    "size_factor": tier.size_factor,
                }
                for tier in self.tiers
            ],
            "period_s": self.period_s,
            "smoothing": self.smoothing,
            "shrink_hysteresis": self.shrink_hysteresis,
        }
