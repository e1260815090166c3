"""Bit-exact SplitMix64 seeding.

Every random quantity in the package is derived from a 64-bit master seed by
the rules below, so results do not depend on thread scheduling or platform:

    splitmix64(x)  = finalizer of (x + GOLDEN) mod 2^64   (Steele et al.)
    mix(seed, i)   = splitmix64(seed XOR splitmix64(i))
    stream(s)[i]   = splitmix64(s + i * GOLDEN)           for i = 0, 1, ...

Row ``l`` of a sample matrix built from master seed ``S`` reads its bits from
``stream(mix(S, l))``; trial ``t`` of an experiment uses master seed
``mix(S, t)``.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def splitmix64(x):
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def mix(seed, index):
    return splitmix64((seed & MASK64) ^ splitmix64(index & MASK64))


def splitmix64_array(x):
    z = np.asarray(x, dtype=np.uint64) + np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def mix_array(seed, indices):
    idx = np.asarray(indices, dtype=np.uint64)
    return splitmix64_array(np.uint64(seed & MASK64) ^ splitmix64_array(idx))


def stream_words(seeds, count):
    """``count`` words of ``stream(s)`` for every seed; shape ``(len(seeds), count)``."""
    seeds = np.asarray(seeds, dtype=np.uint64).reshape(-1, 1)
    steps = np.arange(count, dtype=np.uint64) * np.uint64(GOLDEN)
    return splitmix64_array(seeds + steps[None, :])


class SplitMix64:
    """Sequential view of ``stream(seed)``."""

    def __init__(self, seed):
        self.seed = seed & MASK64
        self.counter = 0

    def next_u64(self):
        w = splitmix64((self.seed + self.counter * GOLDEN) & MASK64)
        self.counter += 1
        return w

    def bits(self, k):
        """``k`` fair bits as an int, least significant first, consuming ceil(k/64) words."""
        out = 0
        shift = 0
        while shift < k:
            out |= self.next_u64() << shift
            shift += 64
        return out & ((1 << k) - 1)

    def uniform(self):
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))
