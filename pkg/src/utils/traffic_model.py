"""Seeded generator of Skype-like call traffic.

Packet sizes follow speech activity: talkspurts produce large datagrams and
silence produces small ones. Payload bytes are uniform (ciphertext) and the
Fun byte of data messages takes one of the eight values ``(k << 4) | 0x0d``.
"""

import logging
from collections.abc import Iterable, Iterator

import numpy as np

from models.errors import RejectedInputError, UndefinedStatisticError
from models.som import SOM_HEADER_LEN, SomMessage
from models.traffic import PacketRecord, SizeDistribution, TrafficProfile, Truth

from .som_codec import DATA_FUN_NIBBLE, SIGNALING_FUNS

logger = logging.getLogger(__name__)

# Inter-arrival jitter, as a fraction of the tick interval
JITTER_FRACTION = 0.10


class ActivityTimeline:
    """Alternating talkspurt/silence segments with exponential durations.

    With ``ratio_block_s > 0`` the segments drawn for each block are rescaled so
    the block holds exactly ``speech_ratio`` speech, which keeps the call's
    55:45 balance even over short horizons.
    """

    def __init__(self, profile: TrafficProfile, rng: np.random.Generator):
        self._profile = profile
        self._rng = rng
        self._means = {Truth.VOICE: profile.mean_talkspurt_s, Truth.SILENCE: profile.mean_silence_s}
        # Segment ends (seconds) and states, generated lazily
        self._ends: list[float] = []
        self._states: list[Truth] = []
        self._cursor = 0
        self._horizon = 0.0
        self._next_state = Truth.VOICE if rng.random() < profile.speech_ratio else Truth.SILENCE

    @staticmethod
    def _flip(state: Truth) -> Truth:
        return Truth.SILENCE if state is Truth.VOICE else Truth.VOICE

    def _draw(self, state: Truth) -> float:
        return float(self._rng.exponential(self._means[state]))

    def _extend_free(self) -> None:
        state = self._next_state
        self._horizon += self._draw(state)
        self._ends.append(self._horizon)
        self._states.append(state)
        self._next_state = self._flip(state)

    def _extend_block(self) -> None:
        block = self._profile.ratio_block_s
        ratio = self._profile.speech_ratio
        segments: list[tuple[Truth, float]] = []
        total = 0.0
        state = self._next_state
        while total < block:
            duration = self._draw(state)
            segments.append((state, duration))
            total += duration
            state = self._flip(state)
        last_state, last_duration = segments[-1]
        segments[-1] = (last_state, last_duration - (total - block))
        # The truncated segment continues into the next block
        self._next_state = last_state

        talk = sum(d for s, d in segments if s is Truth.VOICE)
        silence = sum(d for s, d in segments if s is Truth.SILENCE)
        if talk == 0.0 or silence == 0.0:
            first = segments[0][0]
            second = self._flip(first)
            segments = [(first, 1.0), (second, 1.0)]
            talk = silence = 1.0
            self._next_state = second
        scale = {Truth.VOICE: ratio * block / talk, Truth.SILENCE: (1.0 - ratio) * block / silence}

        start = self._horizon
        for seg_state, duration in segments:
            self._horizon += duration * scale[seg_state]
            self._ends.append(self._horizon)
            self._states.append(seg_state)
        # Pin the block edge against float drift
        self._horizon = start + block
        self._ends[-1] = self._horizon

    def state_at(self, t: float) -> Truth:
        """Activity state at time ``t`` seconds; ``t`` must not decrease between calls."""
        while self._horizon <= t:
            if self._profile.ratio_block_s > 0:
                self._extend_block()
            else:
                self._extend_free()
        while self._ends[self._cursor] <= t:
            self._cursor += 1
        return self._states[self._cursor]


class CallSource:
    """Streaming packet source for one call direction.

    The caller chooses the packet rate and size factor for every tick, which
    lets the overt sender's rate adaptation drive generation in closed loop.

    Example:
        ```python
        source = CallSource(TrafficProfile(seed=7), duration_s=60)
        while (record := source.next_packet(50, 1.0)) is not None:
            ...
        ```
    """

    def __init__(self, profile: TrafficProfile, duration_s: float):
        if duration_s <= 0:
            raise RejectedInputError(f"duration must be > 0, got {duration_s}")
        self.profile = profile
        self.duration_s = duration_s
        activity_seq, packet_seq = np.random.SeedSequence(entropy=profile.seed).spawn(2)
        self._timeline = ActivityTimeline(profile, np.random.default_rng(activity_seq))
        self._rng = np.random.default_rng(packet_seq)
        self._nominal: float | None = None
        self._last_interval = 0.0
        self._index = 0

    def next_tick_time(self, packet_rate: int) -> float | None:
        """Nominal time (seconds) of the next tick at ``packet_rate``, or None once the call is over."""
        interval = 1.0 / packet_rate
        if self._nominal is None:
            nominal = interval / 2
        else:
            nominal = self._nominal + interval
        return nominal if nominal < self.duration_s else None

    def _draw_size(self, dist: SizeDistribution, size_factor: float) -> int:
        raw = self._rng.normal(dist.mean, dist.stddev) * size_factor
        low = max(SOM_HEADER_LEN + 1, round(dist.min * size_factor))
        high = max(low, round(dist.max * size_factor))
        return int(np.clip(round(raw), low, high))

    def next_packet(self, packet_rate: int, size_factor: float = 1.0) -> PacketRecord | None:
        """Emit the next packet, or None when the call duration is exhausted.

        Args:
            packet_rate: Packets per second for this tick.
            size_factor: Multiplier on the profile's size distributions.
        """
        nominal = self.next_tick_time(packet_rate)
        if nominal is None:
            return None
        interval = 1.0 / packet_rate
        self._nominal = nominal
        rng = self._rng

        jitter = rng.uniform(-JITTER_FRACTION, JITTER_FRACTION) * interval
        timestamp = max(0, int(round((nominal + jitter) * 1_000_000)))

        if rng.random() < self.profile.signaling_fraction:
            truth = Truth.SIGNALING
            fun = SIGNALING_FUNS[int(rng.integers(len(SIGNALING_FUNS)))]
            size = self._draw_size(self.profile.silence_size, size_factor)
        else:
            truth = self._timeline.state_at(nominal)
            fun = (int(rng.integers(8)) << 4) | DATA_FUN_NIBBLE
            dist = self.profile.voice_size if truth is Truth.VOICE else self.profile.silence_size
            size = self._draw_size(dist, size_factor)

        message = SomMessage(
            id=int(rng.integers(0x10000)),
            fun=fun,
            payload=rng.bytes(size - SOM_HEADER_LEN),
        )
        record = PacketRecord(index=self._index, timestamp=timestamp, message=message, truth=truth)
        self._index += 1
        return record

    def __iter__(self) -> Iterator[PacketRecord]:
        while (record := self.next_packet(self.profile.packet_rate)) is not None:
            yield record


def generate_call(profile: TrafficProfile, duration_s: float) -> list[PacketRecord]:
    """Generate a complete call at the profile's fixed packet rate.

    Args:
        profile: Generator parameters, seed included.
        duration_s: Call length in seconds.

    Returns:
        Time-ordered packet records; identical for identical (profile, duration).
    """
    trace = list(CallSource(profile, duration_s))
    logger.debug("generated %d packets over %.1f s (seed %d)", len(trace), duration_s, profile.seed)
    return trace


def empirical_silence_fraction(trace: Iterable[PacketRecord]) -> float:
    """Fraction of data packets labeled Silence.

    Raises:
        UndefinedStatisticError: If the trace holds no data packets.
    """
    silence = data = 0
    for record in trace:
        if record.truth is Truth.SIGNALING:
            continue
        data += 1
        if record.truth is Truth.SILENCE:
            silence += 1
    if data == 0:
        raise UndefinedStatisticError("silence fraction undefined: no data packets in trace")
    return silence / data
