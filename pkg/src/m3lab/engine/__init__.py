"""Deterministic Match-3 rules engine with forward modeling."""

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
    find_matches,
    legal_moves,
    score_match,
)
from .errors import ConfigError, EngineFault, InputError, M3Error, StateError
from .game import (
    GameRecord,
    GameState,
    MoveRecord,
    apply_move,
    new_game,
    play_game,
    record_outcome,
    replay_game,
    reshuffle_if_dead,
    resolve_cascades,
    start_record,
)
from .presets import Preset, load_preset, load_preset_dir, save_preset
from .refill import RefillSource

__all__ = [
    "BoardConfig",
    "CascadeResult",
    "CascadeStep",
    "ConfigError",
    "EngineFault",
    "GameRecord",
    "GameState",
    "InputError",
    "M3Error",
    "MatchGroup",
    "Move",
    "MoveOutcome",
    "MoveRecord",
    "Preset",
    "RefillSource",
    "ReshuffleEvent",
    "SpawnEvent",
    "StateError",
    "apply_move",
    "available_move_count",
    "find_matches",
    "legal_moves",
    "load_preset",
    "load_preset_dir",
    "new_game",
    "play_game",
    "record_outcome",
    "replay_game",
    "reshuffle_if_dead",
    "resolve_cascades",
    "save_preset",
    "score_match",
    "start_record",
]
