"""Seedable counter-based RNG streams.

Every sampling routine in this package takes an explicit stream or seed;
nothing touches numpy's global state. Streams are derived as
``stream(seed, *path)`` where the path is a tuple of nonnegative integers
(trial index, block index, restart index, ...). The underlying generator
is Philox, a counter-based generator, so the stream for a given
``(seed, path)`` is identical on every platform, process and thread
layout.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator for ``(seed, path)``; same arguments, same stream."""
    if any(int(p) < 0 for p in path):
        raise ValueError("stream path entries must be nonnegative")
    ss = np.random.SeedSequence(
        entropy=int(seed) & _MASK64,
        spawn_key=tuple(int(p) for p in path),
    )
    return np.random.Generator(np.random.Philox(ss))


def child_seed(seed: int, *path: int) -> int:
    """Derive an independent 64-bit sub-seed, for labelling nested estimators."""
    ss = np.random.SeedSequence(
        entropy=int(seed) & _MASK64,
        spawn_key=tuple(int(p) for p in path),
    )
    return int(ss.generate_state(1, dtype=np.uint64)[0])
