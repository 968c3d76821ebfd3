"""Board-level types and pure board queries.

The board itself is a plain ``int8[H, W]`` numpy array of color ids; these
helpers wrap the compiled kernels with the object-level API the rest of the
workbench consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import ConfigError, InputError

Cell = tuple[int, int]


@dataclass(frozen=True)
class BoardConfig:
    width: int = 7
    height: int = 7
    num_colors: int = 6
    moves_per_game: int = 20
    # Undocumented in the source framework; kept configurable. Default: an
    # undone swap costs nothing, so humans and agents play comparable games.
    invalid_swap_consumes_move: bool = False

    def validate(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ConfigError("board dimensions must be positive")
        if max(self.width, self.height) < 3:
            raise ConfigError("at least one board dimension must be >= 3")
        if self.num_colors < 3:
            raise ConfigError("num_colors must be >= 3")
        if self.moves_per_game < 1:
            raise ConfigError("moves_per_game must be >= 1")


class Move(NamedTuple):
    """An adjacent swap, canonically ordered so Move(a, b) == Move(b, a)."""

    a: Cell
    b: Cell

    @classmethod
    def of(cls, a: Cell, b: Cell) -> "Move":
        a = (int(a[0]), int(a[1]))
        b = (int(b[0]), int(b[1]))
        return cls(a, b) if a <= b else cls(b, a)


@dataclass(frozen=True)
class MatchGroup:
    """One match event: the union of >=3-runs of one color sharing cells."""

    cells: frozenset[Cell]
    color: int

    @property
    def size(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class CascadeStep:
    matches: tuple[MatchGroup, ...]
    multiplier: int
    points: int


@dataclass(frozen=True)
class CascadeResult:
    steps: tuple[CascadeStep, ...]
    total_points: int

    @property
    def final_multiplier_reached(self) -> int:
        return len(self.steps) if self.steps else 0


@dataclass(frozen=True)
class MoveOutcome:
    valid: bool
    cascade: CascadeResult | None
    points_gained: int
    resulting_moves_available: int
    reshuffled: bool = False


def score_match(group_size: int, multiplier: int) -> int:
    """Points for clearing one group: per-cell value 20 for a triple, +10 per
    extra cell, times the cell count, times the cascade multiplier."""
    if group_size < 3:
        raise InputError(f"match size must be >= 3, got {group_size}")
    if multiplier < 1:
        raise InputError(f"multiplier must be >= 1, got {multiplier}")
    return (20 + 10 * (group_size - 3)) * group_size * multiplier


def find_matches(grid: np.ndarray) -> list[MatchGroup]:
    """All current match groups in deterministic scan order."""
    labels, _sizes, n = kernels.match_labels(grid)
    if n == 0:
        return []
    cells: list[list[Cell]] = [[] for _ in range(n)]
    colors = [0] * n
    h, w = grid.shape
    for r in range(h):
        for c in range(w):
            g = labels[r, c]
            if g >= 0:
                cells[g].append((r, c))
                colors[g] = int(grid[r, c])
    return [
        MatchGroup(cells=frozenset(cs), color=colors[g]) for g, cs in enumerate(cells)
    ]


def legal_moves(grid: np.ndarray) -> list[Move]:
    """Every adjacent swap that creates a match, in canonical scan order."""
    h, w = grid.shape
    buf = np.empty((kernels.max_move_count(h, w), 4), dtype=np.int64)
    n = kernels.moves_into(grid, buf)
    return [
        Move((int(buf[i, 0]), int(buf[i, 1])), (int(buf[i, 2]), int(buf[i, 3])))
        for i in range(n)
    ]


def available_move_count(grid: np.ndarray) -> int:
    return int(kernels.count_moves(grid))


def validate_move_cells(grid: np.ndarray, move: Move) -> None:
    h, w = grid.shape
    for r, c in (move.a, move.b):
        if not (0 <= r < h and 0 <= c < w):
            raise InputError(f"cell ({r}, {c}) out of bounds for {h}x{w} board")
    dr = abs(move.a[0] - move.b[0])
    dc = abs(move.a[1] - move.b[1])
    if dr + dc != 1:
        raise InputError(f"cells {move.a} and {move.b} are not orthogonally adjacent")


@dataclass
class SpawnEvent:
    """One refill spawn: a color landing at a cell."""

    cell: Cell
    color: int


@dataclass
class ReshuffleEvent:
    """A dead-board reshuffle; records the resulting grid row-major."""

    grid: list[int] = field(default_factory=list)
