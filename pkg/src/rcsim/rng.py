"""Seeded, splittable random streams.

A stream is addressed by ``(seed, key)`` where ``key`` is a tuple of
non-negative integers. The generator behind it is PCG64 seeded through
numpy's ``SeedSequence`` with the key as spawn key, so a given address always
yields the same draws no matter which thread asks for it or what other
streams were consumed first.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RngStream:
    seed: int
    key: tuple[int, ...] = (0,)

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        key = (self.key,) if isinstance(self.key, int) else tuple(int(k) for k in self.key)
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "key", key)

    @property
    def stream(self) -> int:
        return self.key[-1]

    def child(self, *index: int) -> "RngStream":
        return RngStream(self.seed, self.key + tuple(index))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.key)
        return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng) -> np.random.Generator:
    """Fresh generator for an RngStream; a Generator is used (and advanced) as is."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng)).generator()
    raise TypeError(f"expected RngStream, Generator or int seed, got {type(rng).__name__}")
