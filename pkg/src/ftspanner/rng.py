"""Deterministic random substreams.

Every random choice in a build is drawn from a stream keyed by
(seed, tag, phase, vertex), so a per-node simulation and a sequential
run can consume identical randomness. Streams are derived by hashing,
independent of PYTHONHASHSEED and platform.
"""

from __future__ import annotations

import hashlib
import random


def substream(*parts) -> random.Random:
    """A Random seeded from the hash of the given key parts."""
    key = "|".join(str(p) for p in parts)
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def vertex_stream(seed, tag: str, phase: int, vertex: int) -> random.Random:
    """The stream a single vertex consumes in a single phase."""
    return substream(seed, tag, phase, vertex)
