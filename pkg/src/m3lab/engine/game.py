"""Stateful game engine: move application, cascade resolution, replay.

``GameState`` is a value type: ``copy()`` yields an independent game, which
is what makes the engine usable as a forward model for tree search. All
randomness flows through the ``RefillSource``, and every post-start spawn
and reshuffle is recorded in ``spawn_log`` so a finished game can be
re-simulated without the generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .board import (
    BoardConfig,
    CascadeResult,
    CascadeStep,
    MatchGroup,
    Move,
    MoveOutcome,
    ReshuffleEvent,
    SpawnEvent,
    available_move_count,
    score_match,
    validate_move_cells,
)
from .errors import ConfigError, EngineFault, StateError
from .refill import RefillSource

SpawnLogEntry = SpawnEvent | ReshuffleEvent


@dataclass
class GameState:
    grid: np.ndarray
    refill: RefillSource
    config: BoardConfig
    score: int = 0
    moves_made: int = 0
    spawn_log: list[SpawnLogEntry] | None = field(default_factory=list)

    @property
    def board(self) -> np.ndarray:
        return self.grid

    @property
    def moves_remaining(self) -> int:
        return self.config.moves_per_game - self.moves_made

    def copy(self) -> "GameState":
        return GameState(
            grid=self.grid.copy(),
            refill=self.refill.copy(),
            config=self.config,
            score=self.score,
            moves_made=self.moves_made,
            spawn_log=None if self.spawn_log is None else list(self.spawn_log),
        )

    def fork(self) -> "GameState":
        """Copy for simulation: identical dynamics, spawn logging off."""
        return GameState(
            grid=self.grid.copy(),
            refill=self.refill.copy(),
            config=self.config,
            score=self.score,
            moves_made=self.moves_made,
            spawn_log=None,
        )


def new_game(
    config: BoardConfig,
    refill: RefillSource,
    initial_grid: np.ndarray | list[list[int]] | None = None,
) -> GameState:
    """Start a game: seeded boards are rejection-sampled so no match exists;
    scripted boards are taken verbatim and must already be match-free.

    Guarantees at least one legal move (a dead fresh board is reshuffled in
    place before the game starts, so the log stays empty at move 0).
    """
    config.validate()
    if refill.qpos.shape[0] != config.width:
        raise ConfigError(
            f"refill source is {refill.qpos.shape[0]} columns wide, board needs {config.width}"
        )
    if initial_grid is not None:
        grid = np.array(initial_grid, dtype=np.int8)
        if grid.shape != (config.height, config.width):
            raise ConfigError(
                f"initial grid is {grid.shape}, expected {(config.height, config.width)}"
            )
        if grid.min() < 0 or grid.max() >= config.num_colors:
            raise ConfigError("initial grid contains out-of-range colors")
        if kernels.has_match(grid):
            raise ConfigError("initial grid contains pre-existing matches")
    else:
        grid = np.empty((config.height, config.width), dtype=np.int8)
        kernels.fill_board(grid, refill.state, config.num_colors)
    if kernels.count_moves(grid) == 0:
        if kernels.reshuffle_board(grid, refill.state) < 0:
            raise EngineFault("could not produce a live starting board")
    return GameState(grid=grid, refill=refill, config=config)


def _groups_at(grid: np.ndarray, labels: np.ndarray, n: int) -> list[MatchGroup]:
    cells: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    colors = [0] * n
    h, w = grid.shape
    for r in range(h):
        for c in range(w):
            g = labels[r, c]
            if g >= 0:
                cells[g].append((r, c))
                colors[g] = int(grid[r, c])
    return [MatchGroup(frozenset(cs), colors[g]) for g, cs in enumerate(cells)]


def resolve_cascades(
    grid: np.ndarray,
    refill: RefillSource,
    num_colors: int,
    spawn_log: list[SpawnLogEntry] | None = None,
) -> CascadeResult:
    """Resolve all matches on ``grid`` in place: score at the running
    multiplier (1, 2, ... per step), clear, drop, refill, repeat until the
    board is at rest. Spawns are appended to ``spawn_log`` when given."""
    steps: list[CascadeStep] = []
    total = 0
    mult = 1
    while True:
        labels, sizes, n = kernels.match_labels(grid)
        if n == 0:
            break
        if len(steps) >= kernels.CASCADE_STEP_CAP:
            raise EngineFault("cascade exceeded step cap")
        groups = _groups_at(grid, labels, n)
        points = sum(score_match(int(sizes[g]), mult) for g in range(n))
        kernels.clear_and_gravity(grid, labels)
        h, w = grid.shape
        holes = [
            (r, c) for c in range(w) for r in range(h) if grid[r, c] == -1
        ]
        kernels.refill(grid, refill.qarr, refill.qlen, refill.qpos, refill.state, num_colors)
        if spawn_log is not None:
            for r, c in holes:
                spawn_log.append(SpawnEvent((r, c), int(grid[r, c])))
        steps.append(CascadeStep(tuple(groups), mult, points))
        total += points
        mult += 1
    return CascadeResult(tuple(steps), total)


def apply_move(state: GameState, move: Move) -> MoveOutcome:
    """Apply an adjacent swap. A swap that creates no match is undone and
    awards nothing; a matching swap cascades to rest and consumes a turn."""
    move = Move.of(move.a, move.b)
    validate_move_cells(state.grid, move)
    if state.moves_made >= state.config.moves_per_game:
        raise StateError("game is over: all moves already made")
    (r0, c0), (r1, c1) = move.a, move.b
    if not kernels.swap_makes_match(state.grid, r0, c0, r1, c1):
        if state.config.invalid_swap_consumes_move:
            state.moves_made += 1
        return MoveOutcome(
            valid=False,
            cascade=None,
            points_gained=0,
            resulting_moves_available=available_move_count(state.grid),
        )
    state.grid[r0, c0], state.grid[r1, c1] = state.grid[r1, c1], state.grid[r0, c0]
    cascade = resolve_cascades(
        state.grid, state.refill, state.config.num_colors, state.spawn_log
    )
    state.score += cascade.total_points
    state.moves_made += 1
    return MoveOutcome(
        valid=True,
        cascade=cascade,
        points_gained=cascade.total_points,
        resulting_moves_available=available_move_count(state.grid),
    )


def reshuffle_if_dead(state: GameState) -> bool:
    """Permute the tile multiset if no legal move exists. Returns whether a
    reshuffle happened; the event is logged so replays stay exact."""
    if kernels.count_moves(state.grid) > 0:
        return False
    if kernels.reshuffle_board(state.grid, state.refill.state) < 0:
        raise EngineFault("no valid reshuffle found within attempt cap")
    if state.spawn_log is not None:
        state.spawn_log.append(
            ReshuffleEvent([int(x) for x in state.grid.ravel()])
        )
    return True


@dataclass
class MoveRecord:
    move: Move
    valid: bool
    points: int


@dataclass
class GameRecord:
    """Replayable record of one finished (or in-progress) game."""

    config: BoardConfig
    initial_grid: list[list[int]]
    moves: list[MoveRecord] = field(default_factory=list)
    avail_counts: list[int] = field(default_factory=list)
    spawn_log: list[SpawnLogEntry] = field(default_factory=list)
    final_score: int = 0

    @property
    def valid_move_count(self) -> int:
        return sum(1 for m in self.moves if m.valid)


def start_record(state: GameState) -> GameRecord:
    return GameRecord(
        config=state.config,
        initial_grid=[[int(x) for x in row] for row in state.grid],
    )


def record_outcome(record: GameRecord, state: GameState, move: Move, outcome: MoveOutcome) -> None:
    record.moves.append(MoveRecord(move, outcome.valid, outcome.points_gained))
    if outcome.valid:
        record.avail_counts.append(outcome.resulting_moves_available)
    record.final_score = state.score


def play_game(state: GameState, policy) -> GameRecord:
    """Drive a game to completion with ``policy(state) -> Move``.

    The per-move available count is sampled after each cascade resolution
    and before any dead-board reshuffle, matching how agents and metrics
    observe the board.
    """
    record = start_record(state)
    if state.spawn_log is None:
        state.spawn_log = []
    record.spawn_log = state.spawn_log
    while state.moves_made < state.config.moves_per_game:
        move = policy(state)
        outcome = apply_move(state, move)
        record_outcome(record, state, move, outcome)
        if state.moves_made < state.config.moves_per_game:
            reshuffle_if_dead(state)
    return record


def replay_game(
    config: BoardConfig,
    initial_grid: list[list[int]],
    moves: list[Move],
    spawn_log: list[SpawnLogEntry],
) -> GameRecord:
    """Re-simulate a recorded game, feeding refills from the log instead of
    a generator. Raises EngineFault if the log disagrees with the replayed
    board (corrupt or mismatched trace)."""
    grid = np.array(initial_grid, dtype=np.int8)
    if kernels.has_match(grid):
        raise EngineFault("replay initial grid contains matches")
    entries = iter(spawn_log)
    record = GameRecord(config=config, initial_grid=[list(map(int, row)) for row in initial_grid])
    score = 0
    moves_made = 0
    for move in moves:
        move = Move.of(move.a, move.b)
        validate_move_cells(grid, move)
        (r0, c0), (r1, c1) = move.a, move.b
        if not kernels.swap_makes_match(grid, r0, c0, r1, c1):
            record.moves.append(MoveRecord(move, False, 0))
            continue
        grid[r0, c0], grid[r1, c1] = grid[r1, c1], grid[r0, c0]
        mult = 1
        gained = 0
        while True:
            labels, sizes, n = kernels.match_labels(grid)
            if n == 0:
                break
            gained += sum(score_match(int(sizes[g]), mult) for g in range(n))
            kernels.clear_and_gravity(grid, labels)
            h, w = grid.shape
            for c in range(w):
                for r in range(h):
                    if grid[r, c] == -1:
                        ev = next(entries, None)
                        if not isinstance(ev, SpawnEvent) or ev.cell != (r, c):
                            raise EngineFault(f"spawn log mismatch at cell ({r}, {c})")
                        grid[r, c] = ev.color
            mult += 1
        score += gained
        moves_made += 1
        record.moves.append(MoveRecord(move, True, gained))
        avail = available_move_count(grid)
        record.avail_counts.append(avail)
        if avail == 0 and moves_made < config.moves_per_game:
            ev = next(entries, None)
            if not isinstance(ev, ReshuffleEvent):
                raise EngineFault("expected reshuffle event in spawn log")
            grid[:] = np.array(ev.grid, dtype=np.int8).reshape(grid.shape)
    record.final_score = score
    record.spawn_log = list(spawn_log)
    return record
