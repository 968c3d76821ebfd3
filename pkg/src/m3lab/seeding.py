"""Deterministic seed derivation shared by evolution, experiments, and tests.

Every random stream in a run is derived from (master_seed, structural key)
via numpy's SeedSequence, never from scheduling order, so results are
byte-identical for any worker count.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def normalize_seed(seed: int) -> int:
    return int(seed) & MASK64


def derive_rng(*key: int) -> np.random.Generator:
    """Independent generator for a structural key such as
    (master_seed, generation, individual_id, seed_index)."""
    return np.random.default_rng(np.random.SeedSequence([normalize_seed(k) for k in key]))


def generate_seed_batches(
    master_seed: int, generations: int, batch_size: int = 50
) -> list[list[int]]:
    """One batch of game seeds per generation, derived from the master seed."""
    root = np.random.SeedSequence(normalize_seed(master_seed))
    return [
        [int(x) for x in child.generate_state(batch_size, np.uint64)]
        for child in root.spawn(generations)
    ]
