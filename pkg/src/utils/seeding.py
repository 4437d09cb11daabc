"""Seed derivation so every random stream of a scenario follows from one master seed."""

from enum import IntEnum

import numpy as np


class Stream(IntEnum):
    """Spawn keys of the independent random streams of one scenario."""

    CHANNEL = 1
    UPSTREAM = 2
    DOWNSTREAM = 3
    UTILIZATION = 4
    SECRET = 5


def derive_seed(master: int, stream: Stream) -> int:
    """Derive a 64-bit seed for ``stream`` from ``master``."""
    sequence = np.random.SeedSequence(entropy=master, spawn_key=(int(stream),))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed))
