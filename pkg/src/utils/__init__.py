"""Library code of the lab: traffic, classification, embedding, channel and analysis."""

from .analysis import (
    FUN_PEAKS,
    SWEEP_COLUMNS,
    SWEEP_GRID,
    analyze_traces,
    build_report,
    byte_histogram,
    byte_uniformity_pvalue,
    measured_bandwidth,
    pearson,
    predicted_bandwidth,
    run_sweep,
)
from .channel_sim import EventLoop, Hop, adapt, readapt, transmit
from .config import load_scenario, reseed, scenario_from_dict
from .scenario import run_scenario
from .silence_classifier import (
    LossGovernor,
    SilenceClassifier,
    SilenceReference,
    classify,
    governor_update,
    score_classifier,
)
from .som_codec import crc16, decode_som, encode_som
from .steg_engine import (
    CovertReceiver,
    CovertTransmitter,
    embed,
    keystream,
    open_chunk,
    reassemble,
    seal_chunk,
    try_extract,
)
from .traffic_model import CallSource, empirical_silence_fraction, generate_call

__all__ = [
    "FUN_PEAKS",
    "SWEEP_COLUMNS",
    "SWEEP_GRID",
    "CallSource",
    "CovertReceiver",
    "CovertTransmitter",
    "EventLoop",
    "Hop",
    "LossGovernor",
    "SilenceClassifier",
    "SilenceReference",
    "adapt",
    "analyze_traces",
    "build_report",
    "byte_histogram",
    "byte_uniformity_pvalue",
    "classify",
    "crc16",
    "decode_som",
    "embed",
    "empirical_silence_fraction",
    "encode_som",
    "generate_call",
    "governor_update",
    "keystream",
    "load_scenario",
    "measured_bandwidth",
    "open_chunk",
    "pearson",
    "predicted_bandwidth",
    "readapt",
    "reassemble",
    "reseed",
    "run_scenario",
    "run_sweep",
    "scenario_from_dict",
    "score_classifier",
    "seal_chunk",
    "transmit",
    "try_extract",
]
