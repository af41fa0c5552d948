"""Reproducible randomness.

All samplers in this package draw from :class:`RandomStream`, a thin wrapper
around the Philox 4x64 counter-based generator.  The raw 64-bit word stream is
a pure function of ``(seed, stream_id)``, so identical inputs reproduce
identical draws on every platform, and distinct stream ids behave as
independent generators.  The word stream is pinned by test vectors in
``tests/test_randomness.py``; everything else (integer draws, uniforms,
shuffles) is derived from the words by the fixed arithmetic below.
"""

from __future__ import annotations

import numpy as np

_BUFFER_WORDS = 8192
_TWO64 = 1 << 64
_DOUBLE_SCALE = 1.0 / (1 << 53)


class RandomStream:
    """Deterministic stream of random draws keyed by ``(seed, stream_id)``.

    Integer draws use the multiply-shift reduction ``(word * n) >> 64``.  The
    reduction bias is below ``n / 2**64``, far outside anything the package's
    statistical tests can resolve, and it keeps every draw exact integer
    arithmetic on the pinned word stream.
    """

    __slots__ = ("seed", "stream_id", "_bitgen", "_buf")

    def __init__(self, seed: int, stream_id: int = 0):
        if not 0 <= seed < _TWO64:
            raise ValueError("seed must fit in 64 bits")
        if not 0 <= stream_id < _TWO64:
            raise ValueError("stream_id must fit in 64 bits")
        self.seed = seed
        self.stream_id = stream_id
        self._bitgen = np.random.Philox(key=np.array([seed, stream_id], dtype=np.uint64))
        self._buf: list[int] = []

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id})"

    def __reduce__(self):
        # Pickled streams restart from the beginning; workers receive fresh
        # (seed, stream_id) pairs, never partially consumed streams.
        return (RandomStream, (self.seed, self.stream_id))

    def substream(self, index: int) -> "RandomStream":
        """Fresh stream for batch ``index``, independent of this one.

        Substream ids are allocated as ``stream_id * 2**20 + 1 + index``; top
        level code uses small stream ids, so batches never collide with them.
        """
        if index < 0:
            raise ValueError("substream index must be nonnegative")
        return RandomStream(self.seed, (self.stream_id * (1 << 20) + 1 + index) % _TWO64)

    def _refill(self):
        raw = self._bitgen.random_raw(_BUFFER_WORDS)
        buf = raw.tolist()
        buf.reverse()  # pop() then yields words in stream order
        self._buf = buf

    def next_word(self) -> int:
        """Next raw 64-bit Philox word."""
        if not self._buf:
            self._refill()
        return self._buf.pop()

    def words(self, n: int) -> list[int]:
        """The next ``n`` raw words, in stream order (test-vector hook)."""
        return [self.next_word() for _ in range(n)]

    def randint(self, n: int) -> int:
        """Uniform integer in ``[0, n)``."""
        if n <= 0:
            raise ValueError("randint needs n >= 1")
        buf = self._buf
        if not buf:
            self._refill()
            buf = self._buf
        return (buf.pop() * n) >> 64

    def random(self) -> float:
        """Uniform double in ``[0, 1)`` with 53-bit resolution."""
        buf = self._buf
        if not buf:
            self._refill()
            buf = self._buf
        return (buf.pop() >> 11) * _DOUBLE_SCALE

    def coin(self) -> bool:
        """Fair coin flip."""
        buf = self._buf
        if not buf:
            self._refill()
            buf = self._buf
        return bool(buf.pop() & 1)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(i + 1)
            items[i], items[j] = items[j], items[i]

    def choice(self, items):
        """Uniform choice from a nonempty sequence."""
        if not items:
            raise ValueError("choice from empty sequence")
        return items[self.randint(len(items))]
