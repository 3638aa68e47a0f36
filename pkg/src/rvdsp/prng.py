"""Seeded splitmix64 generator for reproducible scenario data.

Kept dependency-free so identical seeds produce identical test vectors
anywhere the algorithm is reimplemented.
"""

from .bits import MASK64, s32


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & MASK64

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def next_word(self):
        """Next value as an unsigned 32-bit word (low half of the u64)."""
        return self.next_u64() & 0xFFFF_FFFF

    def words(self, n):
        return [self.next_word() for _ in range(n)]

    def signed_words(self, n):
        return [s32(self.next_word()) for _ in range(n)]
