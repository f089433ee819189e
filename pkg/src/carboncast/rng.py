"""Self-contained 64-bit linear congruential generator.

Fold assignment and fixture generation use this generator instead of
platform randomness so that identical seeds reproduce identical streams on
any machine or language.  The recurrence is

    state <- (6364136223846793005 * state + 1442695040888963407) mod 2^64

(Knuth's MMIX multiplier and increment).  Uniform doubles take the top 53
bits of the state, bounded integers use rejection sampling on the raw
64-bit output, and normals come from the Box-Muller transform.
"""

import math

_A = 6364136223846793005
_C = 1442695040888963407
_MASK = (1 << 64) - 1


class Lcg64:
    """Deterministic PRNG; the full algorithm is specified in this module."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (_A * self._state + _C) & _MASK
        return self._state

    def random(self) -> float:
        """Uniform double in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def normal(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        """Box-Muller; consumes two uniforms per call."""
        u1 = self.random()
        u2 = self.random()
        while u1 <= 0.0:  # log(0) guard, probability 2^-53
            u1 = self.random()
        z = math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
        return mu + sigma * z

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates, descending index convention."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]
