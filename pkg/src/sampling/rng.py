"""Reproducible random streams.

An RngStream is a (seed, stream) pair; identical pairs yield identical draws.
Monte Carlo iteration k uses stream k, so results do not depend on scheduling.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=(self.stream,))))

    def child(self, index: int) -> "RngStream":
        """Stream for Monte Carlo iteration `index`."""
        return RngStream(self.seed, index)


RngLike = Union[RngStream, np.random.Generator, int]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    return RngStream(int(rng)).generator()


def complex_normal(gen: np.random.Generator, shape) -> np.ndarray:
    """Circular complex Gaussian, real and imaginary parts each of variance 1/2."""
    return (gen.standard_normal(shape) + 1j * gen.standard_normal(shape)) / np.sqrt(2.0)
