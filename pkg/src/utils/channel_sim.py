"""Simulated UDP hops, the overt sender's rate adaptation and a virtual-clock event loop."""

import heapq
import itertools
import logging
from collections.abc import Callable, Iterable

from models.channel import DEFAULT_TIERS, AdaptationTier, BernoulliLoss, ChannelConfig, GilbertElliottLoss
from models.errors import MonotonicityError, RejectedInputError
from models.traffic import PacketRecord

from .seeding import make_rng

logger = logging.getLogger(__name__)


class GilbertElliottState:
    """Two-state Markov loss process; starts in the Good state."""

    def __init__(self, model: GilbertElliottLoss):
        self.model = model
        self.bad = False

    def step(self, rng) -> None:
        if self.bad:
            if rng.random() < self.model.p_bad_to_good:
                self.bad = False
        elif rng.random() < self.model.p_good_to_bad:
            self.bad = True

    @property
    def loss_probability(self) -> float:
        return self.model.loss_bad if self.bad else self.model.loss_good


class Hop:
    """One lossy UDP hop with its own random stream.

    Packets are pushed one at a time; with reordering enabled a surviving
    packet may be held back and released right after its successor.
    """

    def __init__(self, config: ChannelConfig):
        self.config = config
        self.dropped = 0
        self.forwarded = 0
        self._rng = make_rng(config.seed)
        self._markov = GilbertElliottState(config.loss) if isinstance(config.loss, GilbertElliottLoss) else None
        self._held: PacketRecord | None = None

    def _drops(self) -> bool:
        if self._markov is not None:
            self._markov.step(self._rng)
            p = self._markov.loss_probability
        else:
            assert isinstance(self.config.loss, BernoulliLoss)
            p = self.config.loss.p
        return self._rng.random() < p

    def push(self, record: PacketRecord) -> list[PacketRecord]:
        """Offer one packet to the hop; returns the packets that leave it now."""
        if self._drops():
            self.dropped += 1
            return []
        out: list[PacketRecord] = []
        if self.config.reorder > 0.0 and self._held is None and self._rng.random() < self.config.reorder:
            self._held = record
            return out
        out.append(record)
        if self._held is not None:
            out.append(self._held)
            self._held = None
        self.forwarded += len(out)
        return out

    def flush(self) -> list[PacketRecord]:
        """Release a held packet at the end of the call."""
        if self._held is None:
            return []
        held, self._held = self._held, None
        self.forwarded += 1
        return [held]


def transmit(packets: Iterable[PacketRecord], channel: ChannelConfig) -> list[PacketRecord]:
    """Pass a time-ordered packet sequence through one hop.

    Args:
        packets: Packets in sending order.
        channel: Loss model, reordering and seed of the hop.

    Returns:
        The delivered packets in arrival order; deterministic for a given seed.
    """
    hop = Hop(channel)
    delivered: list[PacketRecord] = []
    for record in packets:
        delivered.extend(hop.push(record))
    delivered.extend(hop.flush())
    logger.debug("hop delivered %d packets, dropped %d", len(delivered), hop.dropped)
    return delivered


def adapt(observed_loss: float, tiers: tuple[AdaptationTier, ...] = DEFAULT_TIERS) -> tuple[int, float]:
    """Map an observed total loss fraction to the overt sender's (packet_rate, size_factor).

    Raises:
        RejectedInputError: If ``observed_loss`` is outside [0, 1].
    """
    if not 0.0 <= observed_loss <= 1.0:
        raise RejectedInputError(f"observed loss must be in [0, 1], got {observed_loss}")
    for tier in tiers:
        if observed_loss < tier.below:
            return tier.packet_rate, tier.size_factor
    last = tiers[-1]
    return last.packet_rate, last.size_factor


def readapt(
    observed_loss: float,
    current: tuple[int, float],
    tiers: tuple[AdaptationTier, ...] = DEFAULT_TIERS,
    shrink_hysteresis: float = 0.0,
) -> tuple[int, float]:
    """Like :func:`adapt`, but stay on ``current`` when the move would shrink datagrams
    and the loss is within ``shrink_hysteresis`` of the boundary.
    """
    rate, factor = adapt(observed_loss, tiers)
    if factor < current[1]:
        held = adapt(min(1.0, observed_loss + shrink_hysteresis), tiers)
        if held[1] >= current[1]:
            return current
    return rate, factor


class LossEstimator:
    """Exponentially smoothed per-period loss, as seen by the overt sender."""

    def __init__(self, smoothing: float):
        self.smoothing = smoothing
        self.value = 0.0

    def update(self, sent: int, unusable: int) -> float:
        if sent:
            self.value += self.smoothing * (unusable / sent - self.value)
        return self.value


class EventLoop:
    """Single-threaded virtual clock.

    Actions run in time order; ties run in scheduling order.
    """

    def __init__(self):
        self.now = 0.0
        self._queue: list[tuple[float, int, Callable[[], None]]] = []
        self._order = itertools.count()

    def __len__(self) -> int:
        return len(self._queue)

    def schedule(self, time: float, action: Callable[[], None]) -> None:
        """Run ``action`` at virtual ``time`` seconds.

        Raises:
            MonotonicityError: If ``time`` lies in the past.
        """
        if time < self.now:
            raise MonotonicityError(f"cannot schedule at {time:.6f} s, clock is at {self.now:.6f} s")
        heapq.heappush(self._queue, (time, next(self._order), action))

    def run(self) -> None:
        while self._queue:
            time, _, action = heapq.heappop(self._queue)
            self.now = time
            action()
