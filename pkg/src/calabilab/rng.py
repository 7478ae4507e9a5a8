"""Seeded 64-bit generator used for reproducible random profiles.

The generator is splitmix64 (Steele, Lea, Flood 2014).  It is spelled out
here, rather than delegated to numpy, so that any implementation following
the same seed produces bit-identical coefficient streams.
"""

MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64 stream; doubles are the top 53 bits scaled to [0, 1)."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_uint64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def next_double(self) -> float:
        return (self.next_uint64() >> 11) * 2.0 ** -53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.next_double()
