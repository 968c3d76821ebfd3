"""Refill sources: where new tiles come from.

Two production variants share one representation: a seeded source is simply
a scripted source with empty queues. Queues are per-column color lists
consumed front-first; when a column's queue runs out the source falls back
to seeded SplitMix64 draws. Copying a source is cheap (a cursor array and a
single uint64), which is what makes the engine a practical forward model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError


@dataclass
class RefillSource:
    """Deterministic tile supply for one game.

    Attributes:
        qarr: int8[W, L] per-column queues (L may be 0 for seeded sources).
        qlen: int64[W] number of scripted entries per column.
        qpos: int64[W] consumption cursor per column.
        state: uint64[1] SplitMix64 fallback state, advanced in place.
    """

    qarr: np.ndarray
    qlen: np.ndarray
    qpos: np.ndarray
    state: np.ndarray

    @classmethod
    def seeded(cls, seed: int, width: int = 7) -> "RefillSource":
        return cls(
            qarr=np.zeros((width, 0), dtype=np.int8),
            qlen=np.zeros(width, dtype=np.int64),
            qpos=np.zeros(width, dtype=np.int64),
            state=kernels.new_rng_state(seed),
        )

    @classmethod
    def scripted(
        cls,
        queues: list[list[int]],
        fallback_seed: int,
        num_colors: int,
    ) -> "RefillSource":
        width = len(queues)
        maxlen = max((len(q) for q in queues), default=0)
        qarr = np.zeros((width, maxlen), dtype=np.int8)
        qlen = np.zeros(width, dtype=np.int64)
        for c, q in enumerate(queues):
            for i, color in enumerate(q):
                if not 0 <= color < num_colors:
                    raise ConfigError(
                        f"queue color {color} out of range [0, {num_colors}) in column {c}"
                    )
                qarr[c, i] = color
            qlen[c] = len(q)
        return cls(
            qarr=qarr,
            qlen=qlen,
            qpos=np.zeros(width, dtype=np.int64),
            state=kernels.new_rng_state(fallback_seed),
        )

    def copy(self) -> "RefillSource":
        # qarr and qlen are immutable after construction; share them.
        return RefillSource(self.qarr, self.qlen, self.qpos.copy(), self.state.copy())

    def pending_queues(self) -> list[list[int]]:
        """Unconsumed scripted entries per column (diagnostics / tests only)."""
        return [
            [int(x) for x in self.qarr[c, self.qpos[c]:self.qlen[c]]]
            for c in range(self.qarr.shape[0])
        ]
