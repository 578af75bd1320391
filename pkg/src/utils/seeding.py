"""
Counter-based seed derivation.

A value is a pure function of (base seed, counter key) through numpy's
SeedSequence hashing, so results never depend on enumeration order or on
which worker produced them.
"""

from typing import Sequence

import numpy as np

from src.models.geometry import EdgeId

_MASK64 = (1 << 64) - 1
_TWO_POW_53 = float(1 << 53)


def _zigzag(value: int) -> int:
    """Map signed integers to non-negative ones (0, -1, 1, -2, ... -> 0, 1, 2, 3, ...)."""
    return 2 * value if value >= 0 else -2 * value - 1


def edge_key(edge: EdgeId) -> tuple:
    """Canonical non-negative integer encoding of an edge."""
    return (edge.dir, len(edge.base)) + tuple(_zigzag(b) for b in edge.base)


def hash64(seed: int, key: Sequence[int]) -> int:
    state = np.random.SeedSequence(entropy=int(seed) & _MASK64, spawn_key=tuple(key)).generate_state(2, np.uint32)
    return (int(state[0]) << 32) | int(state[1])


def uniform01(seed: int, key: Sequence[int]) -> float:
    """Uniform draw in [0, 1) with 53 random bits."""
    return (hash64(seed, key) >> 11) / _TWO_POW_53


def edge_uniform(seed: int, edge: EdgeId) -> float:
    return uniform01(seed, edge_key(edge))


def mix(base: int, index: int) -> int:
    """Per-trial seed derived from a base seed."""
    return hash64(base, (0x7472, int(index)))


def generator(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed) & _MASK64))
