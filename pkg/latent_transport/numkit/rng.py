"""Deterministic, counter-based random streams."""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


class RngStream:
    """Random stream keyed by ``(seed, stream_id)`` on a Philox counter generator.

    The Philox key is derived from the seed, the stream id and the child path
    through ``numpy.random.SeedSequence``, so the output is a pure function of
    those integers and the starting counter on every platform.
    """

    __slots__ = ("seed", "stream_id", "counter", "path", "_generator")

    def __init__(self, seed: int, stream_id: int, counter: int = 0, path: tuple[int, ...] = ()) -> None:
        if counter < 0:
            raise ValueError(f"counter must be >= 0, got {counter}")
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        self.counter = int(counter)
        self.path = tuple(int(k) & _MASK64 for k in path)
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id, *self.path))
        key = sequence.generate_state(2, dtype=np.uint64)
        self._generator = np.random.Generator(np.random.Philox(key=key, counter=self.counter))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}, counter={self.counter}, path={self.path})"

    @property
    def generator(self) -> np.random.Generator:
        return self._generator

    def child(self, key: int) -> "RngStream":
        """Independent sub-stream for a nested sampling site."""
        return RngStream(self.seed, self.stream_id, 0, (*self.path, key))

    def normal(self, size: int | tuple[int, ...] | None = None) -> np.ndarray:
        return self._generator.standard_normal(size)

    def uniform(self, size: int | tuple[int, ...] | None = None) -> np.ndarray:
        return self._generator.random(size)

    def permutation(self, n: int) -> np.ndarray:
        return self._generator.permutation(n)

    def choice(self, n: int, size: int, p: np.ndarray | None = None) -> np.ndarray:
        return self._generator.choice(n, size=size, p=p)


def make_rng(seed: int, stream_id: int) -> RngStream:
    """Stream producing standard-normal and uniform draws for ``(seed, stream_id)``."""
    return RngStream(seed, stream_id)


__all__ = ["RngStream", "make_rng"]
