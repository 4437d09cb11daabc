"""Dataclasses shared by the library, the CLI and the dashboard."""

from .channel import (
    DEFAULT_TIERS,
    AdaptationTier,
    BernoulliLoss,
    ChannelConfig,
    GilbertElliottLoss,
    RateAdaptation,
)
from .classifier import ClassifierConfig, GovernorDecision, GovernorState, SizeClass
from .errors import (
    ConfigError,
    IntegrityConflictError,
    MalformedMessageError,
    MonotonicityError,
    RejectedInputError,
    SkydeError,
    UndefinedStatisticError,
)
from .metrics import ByteHistogram, MetricsReport
from .scenario import Placement, ScenarioConfig, ScenarioResult, SecretSource, TimelineRow
from .som import SomMessage
from .steg import Chunk, EmbedStats, KeyMaterial
from .traffic import PacketRecord, SizeDistribution, TrafficProfile, Truth

__all__ = [
    "DEFAULT_TIERS",
    "AdaptationTier",
    "BernoulliLoss",
    "ByteHistogram",
    "ChannelConfig",
    "Chunk",
    "ClassifierConfig",
    "ConfigError",
    "EmbedStats",
    "GilbertElliottLoss",
    "GovernorDecision",
    "GovernorState",
    "IntegrityConflictError",
    "KeyMaterial",
    "MalformedMessageError",
    "MetricsReport",
    "MonotonicityError",
    "PacketRecord",
    "Placement",
    "RateAdaptation",
    "RejectedInputError",
    "ScenarioConfig",
    "ScenarioResult",
    "SecretSource",
    "SizeClass",
    "SizeDistribution",
    "SkydeError",
    "SomMessage",
    "TimelineRow",
    "TrafficProfile",
    "Truth",
    "UndefinedStatisticError",
]
