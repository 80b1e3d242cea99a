"""Counter-based random streams.

Replication ``i`` under master seed ``s`` gets the SplitMix64 sequence
started at ``key(s, i)``; the k-th output depends only on ``(s, i, k)``, so
results do not depend on how replications are scheduled.  The numba kernels
in :mod:`urnlab.sim._kernels` reproduce these functions bit for bit.
"""

from __future__ import annotations

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
# separates the replication index from the master seed before mixing
INDEX_SALT = 0xD1B54A32D192ED03


def mix64(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * MIX1) & MASK
    z = ((z ^ (z >> 27)) * MIX2) & MASK
    return z ^ (z >> 31)


def stream_key(master_seed: int, index: int) -> int:
    if not 0 <= master_seed <= MASK:
        raise ValueError("master_seed must be a 64-bit unsigned integer")
    if index < 0:
        raise ValueError("index must be nonnegative")
    return mix64(mix64(master_seed) ^ mix64((index * INDEX_SALT + GOLDEN) & MASK))


class RandomStream:
    """Deterministic uniform stream for one replication."""

    def __init__(self, master_seed: int, index: int = 0):
        self.master_seed = master_seed
        self.index = index
        self._state = stream_key(master_seed, index)

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK
        return mix64(self._state)

    def uniform(self) -> float:
        """Uniform on [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53
