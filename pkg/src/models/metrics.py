"""Byte histograms and the per-call metrics document."""

from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .errors import RejectedInputError


@dataclass(frozen=True)
class ByteHistogram:
    """Pooled byte-value counts over encoded datagrams.

    Attributes:
        counts: 256 nonnegative counts, indexed by byte value.
    """

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.counts) != 256:
            raise RejectedInputError(f"histogram needs 256 bins, got {len(self.counts)}")

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def normalized(self) -> np.ndarray:
        """Bin frequencies summing to 1 (all zeros for an empty histogram)."""
        counts = np.asarray(self.counts, dtype=np.float64)
        total = counts.sum()
        return counts / total if total else counts


@dataclass
class MetricsReport:
    """Metrics of one call, serializable to JSON and back without loss."""

    duration_s: float
    steg_bandwidth_bps: float
    offered_bandwidth_bps: float
    total_loss_fraction: float
    histogram_correlation: float | None
    classifier_precision: float | None
    classifier_recall: float | None
    silence_fraction: float | None
    effective_utilization: float
    packets_sent: int
    packets_delivered: int
    packets_embedded: int
    governor_suspensions: int
    uniformity_pvalue: float | None = None
    packet_rate_series: list[float] = field(default_factory=list)
    reference_size_series: list[float | None] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "MetricsReport":
        return cls(**data)
