"""Counter-derived random substreams for bit-reproducible experiments.

Every stochastic component draws from a generator identified by a root seed
plus an integer path (step index, purpose tag, ...).  Streams depend only on
those identifiers, never on draw order, so a parallel fan-out produces the
same numbers as a sequential run.
"""

from __future__ import annotations

import numpy as np


def substream(seed: int, *path: int) -> np.random.Generator:
    """Independent Philox generator for the given (seed, path) identifier."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))
