"""Portable seeded random numbers.

All randomness in the package comes from xoshiro256** seeded through
splitmix64, so trajectories are reproducible bit-for-bit across platforms
and across the compiled and pure-Python backends.

* ``splitmix64(z)``: add 0x9E3779B97F4A7C15, then the standard finalizer.
* ``mix(master, *words)``: ``h = splitmix64(master)``, then for each word
  ``h = splitmix64(h ^ word)``.  Used to derive per-trial and per-instance
  seeds.
* ``Xoshiro256(seed)``: state word ``i`` is ``splitmix64(seed + i*golden)``.
* ``random()``: ``(next_u64() >> 11) * 2**-53``.
* ``below(n)``: unbiased, rejects draws ``r < (2**64 - n) % n`` and
  returns ``r % n``.  Always consumes at least one draw.
* ``bit()``: top bit of one draw.
"""

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(z: int) -> int:
    z = (z + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix(master: int, *words: int) -> int:
    h = splitmix64(master & MASK64)
    for w in words:
        h = splitmix64(h ^ (w & MASK64))
    return h


def _rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256:
    """xoshiro256** generator; ``state`` is a list of four 64-bit words."""

    __slots__ = ("state",)

    def __init__(self, seed: int = 0):
        seed &= MASK64
        self.state = [splitmix64((seed + i * GOLDEN) & MASK64) for i in range(4)]

    @classmethod
    def from_state(cls, state):
        rng = cls.__new__(cls)
        rng.state = [int(w) & MASK64 for w in state]
        return rng

    def next_u64(self) -> int:
        s = self.state
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        threshold = ((1 << 64) - n) % n
        while True:
            r = self.next_u64()
            if r >= threshold:
                return r % n

    def bit(self) -> int:
        return self.next_u64() >> 63

    def choice_index(self, k: int) -> int:
        """Index into a tie set of size ``k``; no draw when ``k == 1``."""
        return 0 if k == 1 else self.below(k)
