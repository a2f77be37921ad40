"""Seeded random ensembles.

All randomness goes through Philox4x64-10, a counter-based generator, keyed
directly by a 64-bit integer. The stream for a given key is fixed by the
Philox definition, so witnesses can be regenerated from ``(seed, case)``
alone.
"""

import numpy as np

MASK64 = (1 << 64) - 1


def make_rng(seed):
    """Return a ``numpy.random.Generator`` backed by Philox keyed by `seed`."""
    return np.random.Generator(np.random.Philox(key=int(seed) & MASK64))


def case_seed(master, index):
    """Per-case seed: master seed XOR case index (64-bit)."""
    return (int(master) ^ int(index)) & MASK64


def random_matrix(n, rng):
    return rng.standard_normal((n, n))


def random_spd_like_diag(n, rng, low=-1.0, high=1.0):
    """Positive diagonal with log-uniform entries in ``[e**low, e**high]``."""
    return np.exp(rng.uniform(low, high, size=n))


def random_trace_class_diag(n, rng):
    """Positive diagonal decaying like ``1/k**2``, jittered."""
    k = np.arange(1, n + 1, dtype=float)
    return rng.uniform(0.5, 1.5, size=n) / k**2
