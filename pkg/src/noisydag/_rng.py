"""Counter-keyed splitmix64 streams shared by the Python and C kernels.

Every Monte Carlo trial draws from its own stream keyed by (seed, stream id),
so results are independent of how trials are chunked across threads.  The C
kernel (``_mckernel.pyx``) reimplements exactly these operations; any change
here must be mirrored there bit for bit.
"""

MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_STREAM_SALT = 0x6A09E667F3BCC909
_INV_2_53 = 1.0 / 9007199254740992.0  # 2^-53


def mix64(z: int) -> int:
    z &= MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_state(seed: int, stream: int) -> int:
    """Initial state for stream `stream` of master seed `seed`."""
    return mix64((mix64(seed) ^ ((stream * _GAMMA) & MASK64) ^ _STREAM_SALT) & MASK64)


class Stream:
    """One splitmix64 stream; deterministic given (seed, stream)."""

    __slots__ = ("state",)

    def __init__(self, seed: int, stream: int = 0):
        self.state = stream_state(seed, stream)

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & MASK64
        return mix64(self.state)

    def uniform(self) -> float:
        # 53-bit mantissa in [0, 1)
        return (self.next_u64() >> 11) * _INV_2_53

    def bit(self) -> int:
        return self.next_u64() >> 63

    def below(self, n: int) -> int:
        # Lemire multiply-shift; bias <= n / 2^64
        return (self.next_u64() * n) >> 64

    def bernoulli(self, p: float) -> int:
        return 1 if self.uniform() < p else 0

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
