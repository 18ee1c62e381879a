"""Portable 64-bit random streams.

Every random decision in the package comes from xoshiro256** seeded by four
outputs of splitmix64.  The compiled kernels carry a C copy of the same
generator, so a given seed yields the same bits on every platform and on
both kernel backends.

Bounded integers use Lemire's multiply-shift rejection on the upper 32 bits
of each draw (exactly uniform); doubles take the upper 53 bits.
"""

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z):
    """splitmix64 output finalizer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master, index):
    """Trial seed ``s_i = H(master, i)``.

    ``H(master, i)`` is the ``(i+1)``-th output of a splitmix64 generator
    started at ``master``, i.e. ``mix64(master + (i + 1) * GOLDEN)``.
    """
    return mix64((master & MASK64) + (index + 1) * GOLDEN)


def seed_list(master, m):
    if m < 1:
        raise ValueError("seed list must be non-empty (m >= 1)")
    return tuple(derive_seed(master, i) for i in range(m))


class Xoshiro256:
    """xoshiro256** with splitmix64 seeding."""

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed):
        sm = int(seed) & MASK64
        s = []
        for _ in range(4):
            sm = (sm + GOLDEN) & MASK64
            s.append(mix64(sm))
        self.s0, self.s1, self.s2, self.s3 = s

    def next64(self):
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        x = (s1 * 5) & MASK64
        result = ((((x << 7) | (x >> 57)) & MASK64) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & MASK64
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def bounded(self, n):
        """Uniform integer in ``[0, n)`` for ``1 <= n < 2**32``."""
        m = (self.next64() >> 32) * n
        low = m & 0xFFFFFFFF
        if low < n:
            threshold = ((1 << 32) - n) % n
            while low < threshold:
                m = (self.next64() >> 32) * n
                low = m & 0xFFFFFFFF
        return m >> 32

    def random(self):
        """Uniform double in ``[0, 1)``."""
        return (self.next64() >> 11) * (1.0 / (1 << 53))

    def sample(self, population, size):
        """``size`` distinct integers from ``range(population)`` (partial Fisher-Yates)."""
        if not 0 <= size <= population:
            raise ValueError("sample size out of range")
        pool = list(range(population))
        for i in range(size):
            j = i + self.bounded(population - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:size]
