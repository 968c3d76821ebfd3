"""Live play sessions implementing the six-round study protocol.

A session holds six rounds (three preset boards, three fresh random seeds,
order shuffled per participant), each played for exactly twenty valid
moves. Invalid swaps are answered but consume nothing. Each finished round
is persisted immediately as a replay-checked trace.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import asdict, dataclass, field

import numpy as np

from ..engine import (
    BoardConfig,
    GameRecord,
    GameState,
    Move,
    MoveOutcome,
    Preset,
    RefillSource,
    apply_move,
    new_game,
    record_outcome,
    reshuffle_if_dead,
    start_record,
)
from ..engine import kernels
from ..engine.errors import ConfigError, InputError, M3Error, StateError
from .store import TRACE_SCHEMA, TraceStore, spawn_log_to_json

ROUNDS_PER_SESSION = 6
PRESET_ROUNDS = 3


class NotFoundError(M3Error):
    """Unknown session id."""


@dataclass(frozen=True)
class RoundSpec:
    kind: str  # "preset" | "seed"
    preset_id: str | None = None
    seed: int | None = None

    def to_json(self) -> dict:
        if self.kind == "preset":
            return {"kind": "preset", "preset_id": self.preset_id}
        return {"kind": "seed", "seed": self.seed}


@dataclass
class Session:
    id: str
    participant: str
    metadata: dict
    round_plan: list[RoundSpec]
    current_round: int = 0  # 0-based; == ROUNDS_PER_SESSION when closed
    state: GameState | None = None
    record: GameRecord | None = None
    timestamps: list[float] = field(default_factory=list)
    round_scores: list[int] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def closed(self) -> bool:
        return self.current_round >= ROUNDS_PER_SESSION


class SessionManager:
    def __init__(
        self,
        presets: list[Preset],
        store: TraceStore,
        moves_per_game: int = 20,
        rng_seed: int | None = None,
    ):
        if len(presets) < PRESET_ROUNDS:
            raise ConfigError(
                f"study protocol needs at least {PRESET_ROUNDS} preset boards, "
                f"got {len(presets)}"
            )
        self.presets = {p.id: p for p in presets}
        self.preset_order = sorted(self.presets)
        self.store = store
        self.moves_per_game = moves_per_game
        self._rng = np.random.default_rng(rng_seed)
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    # -- session lifecycle --------------------------------------------------

    def create_session(self, participant: str, metadata: dict | None = None) -> Session:
        if not participant or not participant.strip():
            raise InputError("participant label must be non-empty")
        with self._lock:
            preset_ids = list(self.preset_order)
            if len(preset_ids) > PRESET_ROUNDS:
                picked = self._rng.choice(len(preset_ids), size=PRESET_ROUNDS, replace=False)
                preset_ids = [preset_ids[int(i)] for i in picked]
            else:
                preset_ids = preset_ids[:PRESET_ROUNDS]
            seeds = [int(x) for x in self._rng.integers(0, 2**63, size=PRESET_ROUNDS)]
            plan = [RoundSpec("preset", preset_id=pid) for pid in preset_ids]
            plan += [RoundSpec("seed", seed=s) for s in seeds]
            order = self._rng.permutation(ROUNDS_PER_SESSION)
            plan = [plan[int(i)] for i in order]
            session = Session(
                id=uuid.uuid4().hex,
                participant=participant.strip(),
                metadata=dict(metadata or {}),
                round_plan=plan,
            )
            self._sessions[session.id] = session
        self._start_round(session)
        self.store.open_session(
            session.id,
            {
                "participant": session.participant,
                "metadata": session.metadata,
                "round_plan": [spec.to_json() for spec in session.round_plan],
                "moves_per_game": self.moves_per_game,
            },
        )
        return session

    def _get(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise NotFoundError(f"unknown session {session_id!r}") from None

    def _start_round(self, session: Session) -> None:
        spec = session.round_plan[session.current_round]
        if spec.kind == "preset":
            state = self.presets[spec.preset_id].new_game(self.moves_per_game)
        else:
            config = BoardConfig(moves_per_game=self.moves_per_game)
            state = new_game(config, RefillSource.seeded(spec.seed, config.width))
        session.state = state
        session.record = start_record(state)
        session.record.spawn_log = state.spawn_log
        session.timestamps = []

    # -- play ----------------------------------------------------------------

    def submit_move(self, session_id: str, a, b) -> dict:
        session = self._get(session_id)
        with session.lock:
            if session.closed:
                raise StateError("session is closed; all six rounds are finished")
            move = _parse_move(a, b)
            state = session.state
            grid_before = state.grid.copy()
            log_start = len(state.spawn_log)
            outcome = apply_move(state, move)
            session.timestamps.append(time.time())
            record_outcome(session.record, state, move, outcome)
            reshuffled = False
            round_completed = False
            if outcome.valid:
                if state.moves_made < self.moves_per_game:
                    reshuffled = reshuffle_if_dead(state)
                else:
                    round_completed = True
            steps = _step_views(grid_before, move, outcome, state.spawn_log[log_start:])
            if round_completed:
                self._finalize_round(session)
            return {
                "valid": outcome.valid,
                "points_gained": outcome.points_gained,
                "moves_available": outcome.resulting_moves_available,
                "steps": steps,
                "reshuffled": reshuffled,
                "round_completed": round_completed,
                "state": self.public_state(session_id),
            }

    def _finalize_round(self, session: Session) -> None:
        spec = session.round_plan[session.current_round]
        trace = {
            "schema": TRACE_SCHEMA,
            "session": session.id,
            "participant": session.participant,
            "round_index": session.current_round + 1,
            "round_spec": spec.to_json(),
            "config": asdict(session.state.config),
            "initial_grid": session.record.initial_grid,
            "moves": [
                {"a": list(m.move.a), "b": list(m.move.b), "valid": m.valid, "points": m.points}
                for m in session.record.moves
            ],
            "spawns": spawn_log_to_json(session.record.spawn_log),
            "avail_counts": session.record.avail_counts,
            "final_score": session.record.final_score,
            "timestamps": session.timestamps,
        }
        self.store.append_trace(session.id, trace)
        session.round_scores.append(session.record.final_score)
        session.current_round += 1
        if session.closed:
            self.store.close_session(session.id, session.round_scores)
            session.state = None
            session.record = None
        else:
            self._start_round(session)

    # -- views ----------------------------------------------------------------

    def public_state(self, session_id: str) -> dict:
        """Snapshot safe to show a participant: never includes refill queues,
        seeds, or anything about upcoming tiles."""
        session = self._get(session_id)
        if session.closed:
            return {
                "session_id": session.id,
                "round_index": ROUNDS_PER_SESSION,
                "rounds_total": ROUNDS_PER_SESSION,
                "session_complete": True,
                "round_scores": list(session.round_scores),
                "total_score": sum(session.round_scores),
            }
        state = session.state
        return {
            "session_id": session.id,
            "round_index": session.current_round + 1,
            "rounds_total": ROUNDS_PER_SESSION,
            "session_complete": False,
            "board": [[int(x) for x in row] for row in state.grid],
            "num_colors": state.config.num_colors,
            "score": state.score,
            "moves_made": state.moves_made,
            "moves_remaining": state.config.moves_per_game - state.moves_made,
            "round_scores": list(session.round_scores),
        }

    def traces(self, session_id: str) -> list[dict]:
        session = self._get(session_id)
        if not session.closed:
            raise StateError("traces are available once the session is closed")
        return self.store.load_sessions()[session_id]["traces"]


def _parse_move(a, b) -> Move:
    for cell in (a, b):
        if (
            not isinstance(cell, (list, tuple))
            or len(cell) != 2
            or not all(isinstance(x, int) for x in cell)
        ):
            raise InputError(f"cell must be [row, col] integers, got {cell!r}")
    return Move.of((a[0], a[1]), (b[0], b[1]))


def _step_views(
    grid_before: np.ndarray, move: Move, outcome: MoveOutcome, spawn_delta
) -> list[dict]:
    """Per-step board snapshots for client animation, rebuilt from the move's
    cascade record and spawn-log delta. The last snapshot is the board at
    rest, before any dead-board reshuffle."""
    if not outcome.valid or outcome.cascade is None:
        return []
    from ..engine import SpawnEvent

    grid = grid_before.copy()
    (r0, c0), (r1, c1) = move.a, move.b
    grid[r0, c0], grid[r1, c1] = grid[r1, c1], grid[r0, c0]
    spawns = [ev for ev in spawn_delta if isinstance(ev, SpawnEvent)]
    cursor = 0
    views = []
    for step in outcome.cascade.steps:
        labels = np.full(grid.shape, -1, dtype=np.int64)
        cleared = []
        for g, group in enumerate(step.matches):
            for (r, c) in group.cells:
                labels[r, c] = g
                cleared.append([r, c])
        kernels.clear_and_gravity(grid, labels)
        holes = int((grid == -1).sum())
        for _ in range(holes):
            ev = spawns[cursor]
            cursor += 1
            grid[ev.cell[0], ev.cell[1]] = ev.color
        views.append(
            {
                "multiplier": step.multiplier,
                "points": step.points,
                "groups": [
                    {"color": g.color, "cells": sorted([list(c) for c in g.cells])}
                    for g in step.matches
                ],
                "cleared": sorted(cleared),
                "grid_after": [[int(x) for x in row] for row in grid],
            }
        )
    return views
