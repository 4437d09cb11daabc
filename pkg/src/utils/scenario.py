"""Scenario orchestration: one simulated call on a virtual clock.

The overt sender emits packets tick by tick. Each packet passes the covert
transmitter, the simulated hops and the covert receiver, then reaches the
overt receiver. Every ``w`` seconds the loss governor judges the finished
window, and every adaptation period the overt sender re-picks its packet rate
and size from the smoothed loss it observed.
"""

import logging
from collections import defaultdict
from functools import partial
from pathlib import Path
from typing import Protocol

from models.classifier import SizeClass
from models.scenario import Placement, ScenarioConfig, ScenarioResult, SecretSource, TimelineRow
from models.traffic import PacketRecord, Truth

from .channel_sim import EventLoop, Hop, LossEstimator, readapt
from .seeding import Stream, derive_seed, make_rng
from .silence_classifier import LossGovernor, SilenceClassifier
from .steg_engine import CovertReceiver, CovertTransmitter
from .traffic_model import CallSource

logger = logging.getLogger(__name__)


class Stage(Protocol):
    def push(self, record: PacketRecord) -> list[PacketRecord]: ...

    def flush(self) -> list[PacketRecord]: ...


class TransmitterTap:
    def __init__(self, transmitter: CovertTransmitter):
        self.transmitter = transmitter
        self.sent: list[PacketRecord] = []
        self.classified: list[tuple[Truth, SizeClass]] = []
        self.embedded: set[int] = set()

    def push(self, record: PacketRecord) -> list[PacketRecord]:
        out, verdict = self.transmitter.process(record)
        if verdict is not None:
            self.classified.append((record.truth, verdict))
        if out is not record:
            self.embedded.add(out.index)
        self.sent.append(out)
        return [out]

    def flush(self) -> list[PacketRecord]:
        return []


class ReceiverTap:
    def __init__(self, receiver: CovertReceiver):
        self.receiver = receiver

    def push(self, record: PacketRecord) -> list[PacketRecord]:
        self.receiver.process(record)
        return [record]

    def flush(self) -> list[PacketRecord]:
        return []


class CallPath:
    """Chain of stages from the overt sender to the overt receiver."""

    def __init__(self, stages: list[Stage]):
        self.stages = stages

    def _forward(self, records: list[PacketRecord], start: int) -> list[PacketRecord]:
        for stage in self.stages[start:]:
            records = [out for record in records for out in stage.push(record)]
        return records

    def push(self, record: PacketRecord) -> list[PacketRecord]:
        return self._forward([record], 0)

    def flush(self) -> list[PacketRecord]:
        arrived: list[PacketRecord] = []
        for position, stage in enumerate(self.stages):
            held = stage.flush()
            if held:
                arrived.extend(self._forward(held, position + 1))
        return arrived


def load_secret(source: SecretSource, master_seed: int) -> bytes:
    """Read the secret file, or draw seeded random bytes when no path is set."""
    if source.path is not None:
        return Path(source.path).read_bytes()
    return make_rng(derive_seed(master_seed, Stream.SECRET)).bytes(source.random_bytes)


class _Counters:
    def __init__(self):
        self.sent: dict[int, int] = defaultdict(int)
        self.usable: dict[int, int] = defaultdict(int)

    def unusable(self, key: int) -> int:
        return self.sent[key] - self.usable[key]


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    """Simulate one call end to end.

    Args:
        cfg: Validated scenario; every random stream follows from its seeds.

    Returns:
        Traces, extracted secret, counters and the per-second timeline.
    """
    logger.info(
        "scenario start: mode=%s u=%.2f duration=%.0fs seed=%d",
        cfg.mode.value,
        cfg.utilization,
        cfg.duration_s,
        cfg.seed,
    )
    secret = load_secret(cfg.secret, cfg.seed)
    source = CallSource(cfg.profile, cfg.duration_s)
    governor = LossGovernor(cfg.governor_threshold)
    transmitter = CovertTransmitter(
        km=cfg.keys,
        secret=secret,
        classifier=SilenceClassifier(cfg.classifier),
        governor=governor,
        utilization=cfg.utilization,
        rng=make_rng(derive_seed(cfg.seed, Stream.UTILIZATION)),
        epoch=cfg.epoch,
    )
    receiver = CovertReceiver(
        km=cfg.keys, classifier=SilenceClassifier(cfg.classifier), epoch=cfg.epoch, strict=False
    )
    tx_tap = TransmitterTap(transmitter)
    channel = Hop(cfg.channel)
    if cfg.mode is Placement.THIRD_PARTY:
        hops = [Hop(cfg.upstream), channel, Hop(cfg.downstream)]
        path = CallPath([hops[0], tx_tap, channel, ReceiverTap(receiver), hops[2]])
    else:
        hops = [channel]
        path = CallPath([tx_tap, channel, ReceiverTap(receiver)])

    window_s = cfg.classifier.window_s
    adaptation = cfg.adaptation
    estimator = LossEstimator(adaptation.smoothing)
    windows = _Counters()
    periods = _Counters()
    generated: list[PacketRecord] = []
    delivered: list[PacketRecord] = []
    tick_second: dict[int, int] = {}
    per_second: dict[int, dict] = {}
    operating = {"rate": cfg.profile.packet_rate, "factor": 1.0}
    loop = EventLoop()

    def deliver(records: list[PacketRecord]) -> None:
        for record in records:
            delivered.append(record)
            if record.index not in tx_tap.embedded:
                windows.usable[int(tick_second[record.index] // window_s)] += 1
                periods.usable[int(tick_second[record.index] // adaptation.period_s)] += 1

    def tick(rate: int, nominal: float) -> None:
        record = source.next_packet(rate, operating["factor"])
        if record is None:
            return
        second = int(nominal)
        tick_second[record.index] = second
        generated.append(record)
        windows.sent[second // window_s] += 1
        periods.sent[second // adaptation.period_s] += 1
        deliver(path.push(record))
        per_second[second] = {
            "packet_rate": rate,
            "size_factor": operating["factor"],
            "reference_size": transmitter.classifier.reference.reference_bytes,
            "governor": governor.state,
        }
        following = source.next_tick_time(operating["rate"])
        if following is not None:
            loop.schedule(following, partial(tick, operating["rate"], following))

    def close_window(index: int) -> None:
        governor.update(windows.sent[index], windows.unusable(index))

    def close_period(index: int) -> None:
        observed = estimator.update(periods.sent[index], periods.unusable(index))
        current = (operating["rate"], operating["factor"])
        rate, factor = readapt(observed, current, adaptation.tiers, adaptation.shrink_hysteresis)
        if (rate, factor) != current:
            logger.info("t=%.0fs smoothed loss %.3f: rate %d -> %d pps", loop.now, observed, operating["rate"], rate)
        operating["rate"], operating["factor"] = rate, factor

    index = 1
    while index * window_s <= cfg.duration_s:
        loop.schedule(index * window_s, partial(close_window, index - 1))
        index += 1
    if adaptation.enabled:
        index = 1
        while index * adaptation.period_s <= cfg.duration_s:
            loop.schedule(index * adaptation.period_s, partial(close_period, index - 1))
            index += 1
    first = source.next_tick_time(operating["rate"])
    if first is not None:
        loop.schedule(first, partial(tick, operating["rate"], first))
    loop.run()
    deliver(path.flush())

    total_len = transmitter.bytes_sent
    extracted, bitmap = receiver.finish(total_len, chunk_count=transmitter.chunks_sent)
    usable = len(delivered) - sum(1 for record in delivered if record.index in tx_tap.embedded)
    timeline = _timeline(generated, delivered, tx_tap.embedded, tick_second, per_second)
    result = ScenarioResult(
        config=cfg,
        generated=generated,
        sent=tx_tap.sent,
        delivered=delivered,
        secret=secret[:total_len],
        extracted=extracted,
        bitmap=bitmap,
        delivered_secret_bytes=receiver.delivered_bytes(total_len),
        stats=transmitter.stats,
        classified=tx_tap.classified,
        timeline=timeline,
        unusable=len(generated) - usable,
        chunks_extracted=len(receiver.chunks),
        governor_suspensions=governor.suspensions,
    )
    logger.info(
        "scenario done: %d packets, %d embedded, %d dropped, %d secret bytes delivered",
        len(generated),
        transmitter.stats.embedded,
        sum(hop.dropped for hop in hops),
        result.delivered_secret_bytes,
    )
    return result


def _timeline(
    generated: list[PacketRecord],
    delivered: list[PacketRecord],
    embedded: set[int],
    tick_second: dict[int, int],
    per_second: dict[int, dict],
) -> list[TimelineRow]:
    sent = defaultdict(int)
    arrived = defaultdict(int)
    usable = defaultdict(int)
    used = defaultdict(int)
    for record in generated:
        sent[tick_second[record.index]] += 1
    for record in delivered:
        second = tick_second[record.index]
        arrived[second] += 1
        if record.index not in embedded:
            usable[second] += 1
    for index in embedded:
        used[tick_second[index]] += 1
    return [
        TimelineRow(
            second=second,
            sent=sent[second],
            delivered=arrived[second],
            unusable=sent[second] - usable[second],
            embedded=used[second],
            packet_rate=state["packet_rate"],
            size_factor=state["size_factor"],
            reference_size=state["reference_size"],
            governor=state["governor"],
        )
        for second, state in sorted(per_second.items())
    ]
