"""Named, deterministic random substreams.

Every random draw in the package comes from a generator obtained through
:func:`substream`. A stream is identified by the user seed plus a tuple of
labels (strings, ints or nested tuples of those); the labels are digested
with SHA-256 so the mapping does not depend on Python's salted ``hash``.
Streams are independent of evaluation order, which is what makes threaded
scoring produce the same bytes as sequential scoring.
"""

from __future__ import annotations

import hashlib
import random

import numpy as np


def _label_words(labels) -> list[int]:
    digest = hashlib.sha256(repr(labels).encode("utf-8")).digest()
    return [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]


def seed_sequence(seed: int, *labels) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_label_words(labels)))


def substream(seed: int, *labels) -> np.random.Generator:
    """PCG64 generator for the stream ``(seed, *labels)``."""
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *labels)))


def py_random(seed: int, *labels) -> random.Random:
    """Stdlib Mersenne Twister for hot loops (tabular Q-learning)."""
    state = seed_sequence(seed, *labels).generate_state(2, dtype=np.uint64)
    return random.Random(int(state[0]) << 64 | int(state[1]))


def stable_digest(obj) -> str:
    """Hex digest of ``repr(obj)``; used to key streams by states."""
    return hashlib.sha256(repr(obj).encode("utf-8")).hexdigest()[:16]
