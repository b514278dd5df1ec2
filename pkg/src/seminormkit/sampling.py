"""Seeded random streams and the scalar/vector distributions used by samplers."""
from __future__ import annotations

import zlib

import numpy as np

from .linalg import Field


def rng_for(seed: int, stream: str) -> np.random.Generator:
    """Independent generator for a named stream; identical for identical (seed, stream)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, zlib.crc32(stream.encode())]))


def log_uniform(rng: np.random.Generator, size, lo: float, hi: float) -> np.ndarray:
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size))


def random_scalars(rng: np.random.Generator, size, field: Field, lo: float = 1e-3,
                   hi: float = 1e3) -> np.ndarray:
    """Scalars with log-uniform modulus in [lo, hi] and a random sign or uniform phase."""
    mag = log_uniform(rng, size, lo, hi)
    if field is Field.REAL:
        return mag * rng.choice([-1.0, 1.0], size)
    return mag * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, size))
