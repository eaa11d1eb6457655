"""Seeded RNG substreams.

Every randomized operation takes an explicit integer seed and derives
independent generators via ``substream(seed, *key)``. Keyed substreams
(e.g. one per frame, or one per RANSAC iteration) make results identical
whether the keyed units run serially or concurrently.
"""

from __future__ import annotations

import numpy as np

_U64 = (1 << 64) - 1


def substream(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for (seed, *key); distinct keys are independent."""
    return np.random.default_rng(np.random.SeedSequence([seed & _U64, *key]))
