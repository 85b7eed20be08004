"""SplitMix64 generator.

Every stochastic routine in the package draws from this generator so that
results are reproducible bit-for-bit across runs, platforms and languages.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB


def mix64(z):
    """SplitMix64 output function applied to a single 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed, index):
    """Independent child seed for job ``index`` of a run seeded with ``seed``."""
    return mix64((seed & MASK64) ^ mix64((index + 1) * GAMMA))


class SplitMix64:
    """Counter-based SplitMix64 stream.

    ``next_u64`` and ``words`` share the same state, so scalar and vectorised
    draws can be interleaved without changing the sequence.
    """

    def __init__(self, seed=0):
        self.state = int(seed) & MASK64

    def next_u64(self):
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def words(self, count):
        """Next ``count`` outputs as a ``uint64`` array."""
        count = int(count)
        if count <= 0:
            return np.zeros(0, dtype=np.uint64)
        k = np.arange(1, count + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.state) + k * np.uint64(GAMMA)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(_MUL1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(_MUL2)
            z = z ^ (z >> np.uint64(31))
        self.state = (self.state + count * GAMMA) & MASK64
        return z

    def bits(self, count):
        """Next ``count`` bits, 64 per word, least-significant bit first."""
        n_words = -(-int(count) // 64)
        raw = self.words(n_words).astype("<u8").view(np.uint8)
        return np.unpackbits(raw, bitorder="little")[:count]

    def uniform(self, count):
        """Doubles in [0, 1) from the top 53 bits of each word."""
        return (self.words(count) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def random(self):
        return (self.next_u64() >> 11) * 2.0**-53

    def below(self, bound):
        """Unbiased integer in [0, bound) by rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            w = self.next_u64()
            if w < limit:
                return w % bound

    def gaussian(self, count):
        """Standard normals by Box-Muller, two per pair of words."""
        pairs = -(-int(count) // 2)
        w = self.words(2 * pairs) >> np.uint64(11)
        u1 = (w[0::2].astype(np.float64) + 1.0) * 2.0**-53  # (0, 1]
        u2 = w[1::2].astype(np.float64) * 2.0**-53
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = 2.0 * np.pi * u2
        out = np.empty(2 * pairs)
        out[0::2] = radius * np.cos(angle)
        out[1::2] = radius * np.sin(angle)
        return out[:count]
