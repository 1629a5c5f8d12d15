"""Counter-based random streams for reproducible, schedule-independent runs.

All randomness in the package flows through named Philox streams keyed by
(seed, *path).  Distinct key tuples give statistically independent streams,
and a stream's output never depends on how work is scheduled across
threads, which is what makes multi-threaded Monte Carlo runs bit-identical
to single-threaded ones.
"""

import numpy as np


def stream(seed, *path):
    """Generator on an independent Philox stream keyed by (seed, *path)."""
    key = (int(seed),) + tuple(int(p) for p in path)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def child_seed(seed, *path):
    """Deterministic integer seed for a nested sampling scope."""
    key = (int(seed),) + tuple(int(p) for p in path)
    return int(np.random.SeedSequence(key).generate_state(1, np.uint64)[0])


def as_generator(seed):
    """Accept either an integer seed or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return stream(seed)
