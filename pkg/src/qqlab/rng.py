"""Deterministic random streams.

All randomness in the package flows through Philox, a counter-based bit
generator, so that any trial of any experiment is reproducible from
(master seed, stream name, trial index) alone.  Trial i of stream "s"
under master seed m uses the generator built from
SeedSequence([m, blake2s("s"), i]); nothing is shared between trials.
"""

from __future__ import annotations

import hashlib

import numpy as np

def _stream_id(stream: str) -> int:
    return int.from_bytes(hashlib.blake2s(stream.encode(), digest_size=8).digest(), "big")


def generator(master_seed: int, stream: str = "main", index: int = 0) -> np.random.Generator:
    """Generator for one trial of one named stream."""
    seq = np.random.SeedSequence([int(master_seed), _stream_id(stream), int(index)])
    return np.random.Generator(np.random.Philox(seq))


def as_generator(seed) -> np.random.Generator:
    """Accept either an integer seed or a ready Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
