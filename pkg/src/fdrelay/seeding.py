"""Deterministic seed derivation for Monte-Carlo runs.

One master 64-bit seed drives everything.  Per-trial streams are derived
with :func:`mix_seed`, a SplitMix64-based integer mixer, so that trials
are reproducible and independent of execution order, and so that adding
a solver to a sweep never shifts the channel draws of existing cells.
"""

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF
_INIT = 0x243F6A8885A308D3  # fractional digits of pi, arbitrary nonzero start


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def mix_seed(*parts: int) -> int:
    """Fold integer parts into one 64-bit seed.

    Order-sensitive: each part is XOR-ed into the accumulator and passed
    through a full SplitMix64 avalanche.
    """
    acc = _INIT
    for p in parts:
        acc = _splitmix64(acc ^ (int(p) & _MASK))
    return acc


def rng_from(*parts: int) -> np.random.Generator:
    """PCG64 generator seeded from ``mix_seed(*parts)``."""
    return np.random.default_rng(mix_seed(*parts))
