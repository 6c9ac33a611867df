"""Counter-based pseudo-random sampling.

Subset selection has to be reproducible from coordinates alone, independent
of any library RNG whose stream may change between releases. Draws are
therefore produced by the splitmix64 finalizer applied to an explicit
counter: draw ``t`` of stream ``s`` under seed ``q`` is
``splitmix64(mix(q, s) + t)``. All arithmetic is 64-bit modular integer
math, so the stream is identical on every platform.
"""

_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 round: add the golden gamma, then finalize-mix."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class CounterRng:
    """Deterministic 64-bit stream keyed by ``(seed, stream)``."""

    def __init__(self, seed: int, stream: int = 0):
        self._key = splitmix64(splitmix64(seed & _MASK) ^ splitmix64(stream & _MASK))
        self._counter = 0

    def next64(self) -> int:
        value = splitmix64((self._key + self._counter) & _MASK)
        self._counter += 1
        return value

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)``, rejection sampled (no modulo bias)."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        span = 1 << 64
        limit = span - span % bound
        while True:
            value = self.next64()
            if value < limit:
                return value % bound

    def sample(self, pool_size: int, count: int) -> list[int]:
        """``count`` distinct indices from ``range(pool_size)``, in draw order.

        Partial Fisher-Yates over an explicit index pool, so the result is a
        pure function of the stream position.
        """
        if count > pool_size:
            raise ValueError(f"cannot draw {count} items from a pool of {pool_size}")
        pool = list(range(pool_size))
        for t in range(count):
            j = t + self.below(pool_size - t)
            pool[t], pool[j] = pool[j], pool[t]
        return pool[:count]
