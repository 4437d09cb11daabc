"""Metrics of simulated calls and the utilization sweep."""

import logging
from collections import defaultdict
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np
import pandas as pd
from scipy.stats import chisquare

from models.classifier import ClassifierConfig, SizeClass
from models.errors import RejectedInputError, UndefinedStatisticError
from models.metrics import ByteHistogram, MetricsReport
from models.scenario import ScenarioConfig, ScenarioResult
from models.som import SomMessage
from models.steg import KeyMaterial
from models.traffic import PacketRecord, Truth

from .scenario import run_scenario
from .silence_classifier import US_PER_SECOND, SilenceClassifier, score_classifier
from .som_codec import DATA_FUN_NIBBLE, encode_som, is_data_fun
from .steg_engine import CovertReceiver
from .traffic_model import empirical_silence_fraction

logger = logging.getLogger(__name__)

# Fun byte values of data messages; they stand out in the byte histogram
FUN_PEAKS: tuple[int, ...] = tuple((k << 4) | DATA_FUN_NIBBLE for k in range(8))

# Utilization grid of the sweep, in percent
SWEEP_GRID: tuple[int, ...] = (0, 20, 30, 40, 50, 60, 80, 100)

SWEEP_COLUMNS: tuple[str, ...] = (
    "utilization_pct",
    "measured_bandwidth_bps",
    "predicted_bandwidth_bps",
    "packet_rate_pps",
    "silence_reference_size_b",
    "total_loss_fraction",
    "effective_utilization",
    "histogram_correlation",
    "governor_suspensions",
)


def byte_histogram(trace: Iterable[PacketRecord | SomMessage]) -> ByteHistogram:
    """Pooled byte-value counts over the encoded datagrams, SoM header included.

    Raises:
        UndefinedStatisticError: If the trace is empty.
    """
    datagrams = [encode_som(item.message if isinstance(item, PacketRecord) else item) for item in trace]
    if not datagrams:
        raise UndefinedStatisticError("byte histogram of an empty trace")
    values = np.frombuffer(b"".join(datagrams), dtype=np.uint8)
    counts = np.bincount(values, minlength=256)
    return ByteHistogram(counts=tuple(int(count) for count in counts))


def pearson(h1: ByteHistogram, h2: ByteHistogram) -> float:
    """Pearson correlation over the 256 paired normalized bins.

    Raises:
        UndefinedStatisticError: If either histogram has zero variance.
    """
    a, b = h1.normalized, h2.normalized
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        raise UndefinedStatisticError("correlation undefined for a zero-variance histogram")
    return float(np.clip(np.corrcoef(a, b)[0, 1], -1.0, 1.0))


def byte_uniformity_pvalue(histogram: ByteHistogram, exclude: Sequence[int] = FUN_PEAKS) -> float:
    """Chi-square p-value of the non-excluded bins against a uniform distribution.

    Raises:
        UndefinedStatisticError: If the remaining bins hold no counts.
    """
    keep = np.ones(256, dtype=bool)
    keep[list(exclude)] = False
    observed = np.asarray(histogram.counts, dtype=np.float64)[keep]
    if observed.sum() == 0:
        raise UndefinedStatisticError("uniformity undefined: no bytes outside the excluded bins")
    return float(chisquare(observed).pvalue)


def predicted_bandwidth(u: float, s: float, packet_rate: float, size: float) -> float:
    """Steganographic bandwidth in bit/s: ``u * s * R * 8 * L``.

    Args:
        u: Utilization of identified silence packets.
        s: Silence fraction of the call's data packets.
        packet_rate: Packets per second, R.
        size: Bytes carried per used packet, L.

    Raises:
        RejectedInputError: If u or s is outside [0, 1] or R, L are not positive.
    """
    if not (0.0 <= u <= 1.0 and 0.0 <= s <= 1.0):
        raise RejectedInputError(f"u and s must be in [0, 1], got u={u} s={s}")
    if packet_rate <= 0 or size <= 0:
        raise RejectedInputError(f"packet rate and size must be positive, got R={packet_rate} L={size}")
    return u * s * packet_rate * 8 * size


def measured_bandwidth(result: ScenarioResult) -> float:
    """Delivered secret bits per second of call time."""
    return result.delivered_secret_bytes * 8 / result.duration_s


def offered_bandwidth(result: ScenarioResult) -> float:
    return result.stats.secret_bits_sent / result.duration_s


def mean_packet_rate(result: ScenarioResult) -> float:
    return len(result.generated) / result.duration_s


def mean_reference_size(result: ScenarioResult) -> float | None:
    sizes = [row.reference_size for row in result.timeline if row.reference_size is not None]
    return float(np.mean(sizes)) if sizes else None


def _or_none(compute, *args):
    try:
        return compute(*args)
    except UndefinedStatisticError:
        return None


def build_report(result: ScenarioResult) -> MetricsReport:
    """Collect the metrics document of one call.

    Statistics that are undefined for the call (for example precision when
    nothing was classified) are reported as None.
    """
    cover = _or_none(byte_histogram, result.generated)
    stego = _or_none(byte_histogram, result.sent)
    correlation = _or_none(pearson, cover, stego) if cover is not None and stego is not None else None
    scores = _or_none(score_classifier, result.classified)
    precision, recall = scores if scores is not None else (None, None)
    return MetricsReport(
        duration_s=result.duration_s,
        steg_bandwidth_bps=measured_bandwidth(result),
        offered_bandwidth_bps=offered_bandwidth(result),
        total_loss_fraction=result.total_loss_fraction,
        histogram_correlation=correlation,
        classifier_precision=precision,
        classifier_recall=recall,
        silence_fraction=_or_none(empirical_silence_fraction, result.generated),
        effective_utilization=result.stats.utilization,
        packets_sent=len(result.generated),
        packets_delivered=len(result.delivered),
        packets_embedded=result.stats.embedded,
        governor_suspensions=result.governor_suspensions,
        uniformity_pvalue=_or_none(byte_uniformity_pvalue, stego) if stego is not None else None,
        packet_rate_series=[float(row.packet_rate) for row in result.timeline],
        reference_size_series=[row.reference_size for row in result.timeline],
    )


def sweep_row(cfg: ScenarioConfig) -> dict:
    """Run one utilization point and return its sweep row."""
    result = run_scenario(cfg)
    report = build_report(result)
    rate = mean_packet_rate(result)
    reference = mean_reference_size(result)
    predicted = None
    if report.silence_fraction is not None and reference is not None and rate > 0:
        predicted = predicted_bandwidth(cfg.utilization, report.silence_fraction, rate, reference)
    return {
        "utilization_pct": round(cfg.utilization * 100),
        "measured_bandwidth_bps": report.steg_bandwidth_bps,
        "predicted_bandwidth_bps": predicted,
        "packet_rate_pps": rate,
        "silence_reference_size_b": reference,
        "total_loss_fraction": report.total_loss_fraction,
        "effective_utilization": report.effective_utilization,
        "histogram_correlation": report.histogram_correlation,
        "governor_suspensions": report.governor_suspensions,
    }


def run_sweep(base: ScenarioConfig, grid: Sequence[int] = SWEEP_GRID, parallel: int = 1) -> pd.DataFrame:
    """Run ``base`` at every utilization of ``grid`` (percent).

    Args:
        base: Scenario whose utilization is overridden per row.
        grid: Utilizations in percent.
        parallel: Worker processes; rows keep grid order either way.

    Returns:
        One row per grid point with the columns of ``SWEEP_COLUMNS``.
    """
    for pct in grid:
        if not 0 <= pct <= 100:
            raise RejectedInputError(f"utilization grid values must be in [0, 100], got {pct}")
    configs = [replace(base, utilization=pct / 100) for pct in grid]
    logger.info("sweep over %s with %d worker(s)", list(grid), parallel)
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            rows = list(pool.map(sweep_row, configs))
    else:
        rows = [sweep_row(cfg) for cfg in configs]
    return pd.DataFrame(rows, columns=list(SWEEP_COLUMNS))


def run_many(configs: Sequence[ScenarioConfig], parallel: int = 1) -> list[MetricsReport]:
    """Run independent scenarios and return their reports in input order."""
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(_report_for, configs))
    else:
        results = [_report_for(cfg) for cfg in configs]
    return results


def _report_for(cfg: ScenarioConfig) -> MetricsReport:
    return build_report(run_scenario(cfg))


def timeline_frame(result: ScenarioResult) -> pd.DataFrame:
    """Per-second timeline as a DataFrame."""
    return pd.DataFrame(
        [
            {
                "second": row.second,
                "sent": row.sent,
                "delivered": row.delivered,
                "unusable": row.unusable,
                "embedded": row.embedded,
                "packet_rate": row.packet_rate,
                "size_factor": row.size_factor,
                "reference_size": row.reference_size,
                "governor": row.governor.value,
            }
            for row in result.timeline
        ],
        columns=[
            "second",
            "sent",
            "delivered",
            "unusable",
            "embedded",
            "packet_rate",
            "size_factor",
            "reference_size",
            "governor",
        ],
    )


def analyze_traces(
    cover: Sequence[PacketRecord],
    stego: Sequence[PacketRecord] | None = None,
    classifier: ClassifierConfig | None = None,
    keys: KeyMaterial | None = None,
    epoch: int = 0,
) -> MetricsReport:
    """Metrics of recorded traces, without re-running the call.

    Args:
        cover: The cover trace as generated.
        stego: The trace as seen after embedding (and possibly loss); defaults to ``cover``.
        classifier: Classifier parameters for the offline precision/recall pass.
        keys: When given, chunks are extracted from ``stego`` to measure bandwidth.
        epoch: Keystream epoch of the call.

    Raises:
        UndefinedStatisticError: If the cover trace is empty.
    """
    if not cover:
        raise UndefinedStatisticError("cannot analyze an empty trace")
    stego = cover if stego is None else stego
    duration_s = float(max(record.timestamp for record in cover) // US_PER_SECOND + 1)

    offline = SilenceClassifier(classifier)
    pairs: list[tuple[Truth, SizeClass]] = []
    rate_series: dict[int, int] = defaultdict(int)
    reference_series: dict[int, float | None] = {}
    for record in sorted(cover, key=lambda item: item.timestamp):
        second = record.timestamp // US_PER_SECOND
        rate_series[second] += 1
        if is_data_fun(record.message.fun):
            pairs.append((record.truth, offline.classify_and_observe(record.message.size, record.timestamp)))
        reference_series[second] = offline.reference.reference_bytes

    delivered_bytes = 0
    chunks = 0
    if keys is not None:
        receiver = CovertReceiver(keys, SilenceClassifier(classifier), epoch)
        for record in stego:
            receiver.process(record)
        chunks = len(receiver.chunks)
        delivered_bytes = sum(len(chunk.data) for chunk in receiver.chunks.values())

    originals = {record.index: record.message for record in cover}
    usable = sum(1 for record in stego if originals.get(record.index) == record.message)
    scores = _or_none(score_classifier, pairs)
    precision, recall = scores if scores is not None else (None, None)
    identified = sum(1 for _, verdict in pairs if verdict is SizeClass.SILENCE)
    cover_hist = byte_histogram(cover)
    stego_hist = _or_none(byte_histogram, stego)
    seconds = range(int(max(rate_series)) + 1)
    return MetricsReport(
        duration_s=duration_s,
        steg_bandwidth_bps=delivered_bytes * 8 / duration_s,
        offered_bandwidth_bps=delivered_bytes * 8 / duration_s,
        total_loss_fraction=(len(cover) - usable) / len(cover),
        histogram_correlation=_or_none(pearson, cover_hist, stego_hist) if stego_hist is not None else None,
        classifier_precision=precision,
        classifier_recall=recall,
        silence_fraction=_or_none(empirical_silence_fraction, cover),
        effective_utilization=chunks / identified if identified else 0.0,
        packets_sent=len(cover),
        packets_delivered=len(stego),
        packets_embedded=chunks,
        governor_suspensions=0,
        uniformity_pvalue=_or_none(byte_uniformity_pvalue, stego_hist) if stego_hist is not None else None,
        packet_rate_series=[float(rate_series.get(second, 0)) for second in seconds],
        reference_size_series=[reference_series.get(second) for second in seconds],
    )
