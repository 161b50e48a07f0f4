"""Named, reproducible random substreams.

Every random quantity in a run is drawn from a generator derived from a
single 64-bit seed and a tuple of names, e.g. ``("tables", "1", "mixed")``.
Names are hashed with CRC-32 so the mapping is stable across processes and
Python versions, which keeps results independent of worker count and call
order.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key(name) -> int:
    return zlib.crc32(str(name).encode("utf-8"))


def substream(seed: int, *names) -> np.random.Generator:
    """Return a generator for the substream ``names`` of ``seed``."""
    if seed is None:
        raise ValueError("a seed is required; entropy-seeded runs are not reproducible")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_key(n) for n in names))
    return np.random.Generator(np.random.PCG64(ss))


def child_seed(seed: int, *names) -> int:
    """A derived 63-bit integer seed, for recording in reports."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_key(n) for n in names))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
