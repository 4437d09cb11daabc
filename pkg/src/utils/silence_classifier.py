"""Sliding time window silence classifier and loss governor.

Every second the smallest data datagram is recorded; once ``w`` seconds are
recorded the reference size ``r`` is the mean of the three smallest entries.
A packet is silence when ``size <= r + delta``. The reference is kept as an
exact fraction so the comparison never suffers rounding.
"""

import heapq
import logging
from collections import deque
from collections.abc import Iterable
from fractions import Fraction
from typing import Any

from models.classifier import ClassifierConfig, GovernorDecision, GovernorState, SizeClass
from models.errors import MonotonicityError, RejectedInputError, UndefinedStatisticError
from models.traffic import Truth

logger = logging.getLogger(__name__)

US_PER_SECOND = 1_000_000
LOSS_CEILING = 0.70


class SilenceReference:
    """Ring of per-second minimum datagram sizes.

    Seconds are counted from the first observed packet. A second in which no
    packet was observed commits nothing. With ``admit_delta`` set, a warm ring
    only admits seconds whose minimum is within ``r + admit_delta``, so a
    second spent entirely in a talkspurt cannot lift the reference.
    """

    def __init__(self, window_s: int = 10, k_lowest: int = 3, admit_delta: int | None = None):
        self.window_s = window_s
        self.k_lowest = k_lowest
        self.admit_delta = admit_delta
        self.rejected_seconds = 0
        self.per_second_minima: deque[int] = deque(maxlen=window_s)
        self._origin: int | None = None
        self._last_timestamp: int | None = None
        self._second: int | None = None
        self._current_min: int | None = None
        self._reference: Fraction | None = None

    @property
    def is_warm(self) -> bool:
        return len(self.per_second_minima) == self.window_s

    @property
    def reference(self) -> Fraction | None:
        """Exact reference size r, or None during warm-up."""
        return self._reference

    @property
    def reference_bytes(self) -> float | None:
        return None if self._reference is None else float(self._reference)

    def _commit(self) -> None:
        if self._current_min is None:
            return
        minimum, self._current_min = self._current_min, None
        if self._reference is not None and self.admit_delta is not None:
            if minimum - self._reference > self.admit_delta:
                self.rejected_seconds += 1
                return
        self.per_second_minima.append(minimum)
        if self.is_warm:
            lowest = heapq.nsmallest(self.k_lowest, self.per_second_minima)
            self._reference = Fraction(sum(lowest), self.k_lowest)

    def advance(self, timestamp: int) -> None:
        """Move the clock to ``timestamp`` (µs), committing any finished second."""
        if self._last_timestamp is not None and timestamp < self._last_timestamp:
            raise MonotonicityError(f"timestamp went backwards: {timestamp} < {self._last_timestamp}")
        self._last_timestamp = timestamp
        if self._origin is None:
            self._origin = timestamp
            self._second = 0
            return
        second = (timestamp - self._origin) // US_PER_SECOND
        if second != self._second:
            self._commit()
            self._second = second

    def observe(self, size: int, timestamp: int) -> "SilenceReference":
        """Record one datagram size seen at ``timestamp`` (µs since call start).

        Raises:
            MonotonicityError: If ``timestamp`` is earlier than the previous one.
        """
        self.advance(timestamp)
        if self._current_min is None or size < self._current_min:
            self._current_min = size
        return self

    def to_dict(self) -> dict[str, Any]:
        return {
            "per_second_minima": list(self.per_second_minima),
            "reference": self.reference_bytes,
            "pending_minimum": self._current_min,
            "rejected_seconds": self.rejected_seconds,
        }


def classify(reference: SilenceReference, config: ClassifierConfig, size: int) -> SizeClass:
    """Classify one datagram size against the current reference.

    Returns Unknown during warm-up, Silence iff ``size <= r + delta``, Voice otherwise.
    """
    r = reference.reference
    if r is None:
        return SizeClass.UNKNOWN
    return SizeClass.SILENCE if size - r <= config.delta else SizeClass.VOICE


class SilenceClassifier:
    """One direction's classifier: configuration plus its reference state.

    Transmitter and receiver each own an instance and feed it the packets they
    see, in order, classifying each packet before observing it.
    """

    def __init__(self, config: ClassifierConfig | None = None):
        self.config = config or ClassifierConfig()
        self.reference = SilenceReference(self.config.window_s, self.config.k_lowest, admit_delta=self.config.delta)

    def classify(self, size: int, timestamp: int) -> SizeClass:
        """Advance to ``timestamp`` and classify ``size`` without observing it."""
        self.reference.advance(timestamp)
        return classify(self.reference, self.config, size)

    def classify_and_observe(self, size: int, timestamp: int) -> SizeClass:
        verdict = self.classify(size, timestamp)
        self.reference.observe(size, timestamp)
        return verdict

    def snapshot(self) -> dict[str, Any]:
        return {"window_s": self.config.window_s, "delta": self.config.delta, **self.reference.to_dict()}


class LossGovernor:
    """Suspends embedding while the total unusable fraction is at the ceiling.

    Unusable packets are channel losses plus packets consumed for embedding,
    which the overt receiver discards as losses.
    """

    def __init__(self, threshold: float = LOSS_CEILING):
        self.threshold = threshold
        self.state = GovernorState.ACTIVE
        self.window_sent = 0
        self.window_unusable = 0
        self.suspensions = 0

    @property
    def allows_embedding(self) -> bool:
        return self.state is GovernorState.ACTIVE

    def update(self, sent: int, unusable: int) -> GovernorDecision:
        """Evaluate one finished window.

        Args:
            sent: Packets sent by the overt sender during the window.
            unusable: Packets of the window the overt receiver could not use.

        Returns:
            Suspend when ``unusable / sent >= threshold``, Allow otherwise
            (an idle window counts as zero loss).

        Raises:
            RejectedInputError: If ``unusable`` exceeds ``sent``.
        """
        if unusable < 0 or sent < 0 or unusable > sent:
            raise RejectedInputError(f"need 0 <= unusable <= sent, got unusable={unusable} sent={sent}")
        self.window_sent = sent
        self.window_unusable = unusable
        ratio = unusable / sent if sent else 0.0
        if ratio >= self.threshold:
            if self.state is GovernorState.ACTIVE:
                self.suspensions += 1
                logger.info("governor suspends embedding: loss %.3f >= %.2f", ratio, self.threshold)
            self.state = GovernorState.SUSPENDED
            return GovernorDecision.SUSPEND
        if self.state is GovernorState.SUSPENDED:
            logger.info("governor resumes embedding: loss %.3f < %.2f", ratio, self.threshold)
        self.state = GovernorState.ACTIVE
        return GovernorDecision.ALLOW


def governor_update(governor: LossGovernor, sent: int, unusable: int) -> tuple[LossGovernor, GovernorDecision]:
    decision = governor.update(sent, unusable)
    return governor, decision


def score_classifier(pairs: Iterable[tuple[Truth, SizeClass]]) -> tuple[float, float]:
    """Precision and recall of the Silence verdict against ground truth.

    Unknown verdicts and signaling packets are left out.

    Raises:
        UndefinedStatisticError: If no packet was predicted or labeled Silence.
    """
    true_pos = false_pos = false_neg = 0
    for truth, verdict in pairs:
        if verdict is SizeClass.UNKNOWN or truth is Truth.SIGNALING:
            continue
        predicted = verdict is SizeClass.SILENCE
        actual = truth is Truth.SILENCE
        if predicted and actual:
            true_pos += 1
        elif predicted:
            false_pos += 1
        elif actual:
            false_neg += 1
    if true_pos + false_pos == 0 or true_pos + false_neg == 0:
        raise UndefinedStatisticError("precision/recall undefined: no silence predicted or labeled")
    return true_pos / (true_pos + false_pos), true_pos / (true_pos + false_neg)
