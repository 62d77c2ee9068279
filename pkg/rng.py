"""Seeded random streams for reproducible experiments.

Every generator in the package comes from ``stream``. The bit generator is
pinned to PCG64 and independent streams are derived with the SeedSequence
spawn-key rule: ``stream(seed, *key)`` seeds PCG64 from
``SeedSequence(seed, spawn_key=key)``. Keys start with one of the
``settings.STREAM_*`` namespaces so that samples, surrogates and matched nulls
drawn under the same base seed never share a stream.
"""

from typing import Tuple

import numpy as np

from errors import ConfigError
from settings import MAX_SEED


def check_seed(seed: int) -> int:
    """Validate a 64-bit unsigned seed and return it as a plain int."""
    try:
        whole = int(seed)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"seed must be an integer, got {seed!r}") from exc
    if isinstance(seed, bool) or whole != seed:
        raise ConfigError(f"seed must be an integer, got {seed!r}")
    seed = whole
    if not 0 <= seed <= MAX_SEED:
        raise ConfigError(f"seed {seed} outside [0, 2**64 - 1]")
    return seed


def stream(seed: int, *key: int) -> np.random.Generator:
    """
    Build the generator for one stream.

    Args:
        seed: Base seed (64-bit unsigned)
        *key: Stream key, e.g. (STREAM_SAMPLE, grid_index, replicate)

    Returns:
        A fresh PCG64-backed Generator; same (seed, key) gives the same draws
    """
    spawn_key: Tuple[int, ...] = tuple(int(k) for k in key)
    sequence = np.random.SeedSequence(check_seed(seed), spawn_key=spawn_key)
    return np.random.Generator(np.random.PCG64(sequence))
