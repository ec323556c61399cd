"""Seedable random stream used by every stochastic step.

The generator is xorshift64* (Marsaglia's xorshift with a multiplicative
output scramble, constant 0x2545F4914F6CDD1D). The seed is expanded into
the 64-bit state with one splitmix64 step so that seed 0 is usable.
Nothing in the package draws from numpy's or the stdlib's global state.
"""

import numpy as np

from defect_bench.constants import UINT64_MASK
from defect_bench.errors import NumericsError

_MULTIPLIER = 0x2545F4914F6CDD1D
_TWO_POW_MINUS_53 = 1.0 / (1 << 53)


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & UINT64_MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & UINT64_MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & UINT64_MASK
    return z ^ (z >> 31)


class RandomSource:
    """Single-owner xorshift64* stream. Not safe to share between workers."""

    __slots__ = ("seed", "_state")

    def __init__(self, seed: int):
        self.seed = int(seed) & UINT64_MASK
        # xorshift state must never be zero
        self._state = _splitmix64(self.seed) or 0x9E3779B97F4A7C15

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed})"

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x ^= (x << 25) & UINT64_MASK
        x ^= x >> 27
        self._state = x
        return (x * _MULTIPLIER) & UINT64_MASK

    def uniform01(self) -> float:
        """Real in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _TWO_POW_MINUS_53

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n), without modulo bias."""
        if n <= 0:
            raise NumericsError(f"randbelow needs n > 0, got {n}")
        limit = ((1 << 64) // n) * n
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def shuffle(self, indices) -> np.ndarray:
        """Fisher-Yates permutation of a copy of `indices`."""
        out = np.array(indices, copy=True)
        for i in range(len(out) - 1, 0, -1):
            j = self.randbelow(i + 1)
            out[i], out[j] = out[j], out[i]
        return out

    def permutation(self, n: int) -> np.ndarray:
        return self.shuffle(np.arange(n, dtype=np.int64))

    def bootstrap_indices(self, n: int) -> np.ndarray:
        """`n` i.i.d. uniform draws from [0, n)."""
        if n <= 0:
            raise NumericsError("bootstrap needs n > 0")
        return np.fromiter((self.randbelow(n) for _ in range(n)), dtype=np.int64, count=n)

    def sample_without_replacement(self, n: int, k: int) -> np.ndarray:
        """`k` distinct values from [0, n), sorted ascending."""
        if not 0 < k <= n:
            raise NumericsError(f"cannot draw {k} of {n} without replacement")
        pool = np.arange(n, dtype=np.int64)
        for i in range(k):
            j = i + self.randbelow(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return np.sort(pool[:k])

    def uniform(self, low: float, high: float, size: tuple[int, ...]) -> np.ndarray:
        """Array of uniform reals in [low, high), filled in row-major order."""
        count = int(np.prod(size))
        draws = np.fromiter((self.uniform01() for _ in range(count)), dtype=np.float64, count=count)
        return (low + (high - low) * draws).reshape(size)

    def spawn(self, offset: int) -> "RandomSource":
        """Independent stream seeded with seed + offset (mod 2^64)."""
        return RandomSource(self.seed + offset)


def rng_stream(seed: int) -> RandomSource:
    """Fresh stream for `seed`."""
    return RandomSource(seed)


def derive_seed(master_seed: int, *offsets: int) -> int:
    """master_seed plus stable offsets, wrapped to 64 bits."""
    return (int(master_seed) + sum(offsets)) & UINT64_MASK


def scramble_seed(seed: int) -> int:
    """splitmix64 of `seed`; adjacent seeds land far apart in 64-bit space."""
    return _splitmix64(int(seed) & UINT64_MASK)
