"""SplitMix64, the bit-exact random stream behind every generator.

    state <- state + 0x9E3779B97F4A7C15            (mod 2^64)
    z <- (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
    z <- (z ^ (z >> 27)) * 0x94D049BB133111EB
    output z ^ (z >> 31)

``randbelow(n)`` rejects outputs >= floor(2^64 / n) * n and returns the rest
modulo n; ``random()`` is ``(output >> 11) * 2^-53``.
"""

MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        limit = ((1 << 64) // n) * n
        while True:
            z = self.next_u64()
            if z < limit:
                return z % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]``."""
        return lo + self.randbelow(hi - lo + 1)

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def choice(self, seq):
        return seq[self.randbelow(len(seq))]

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def fork(self) -> "SplitMix64":
        """Independent child stream seeded from this one."""
        return SplitMix64(self.next_u64())
