"""Preset boards: predetermined grids plus scripted falling pieces.

File format is JSON with schema tag ``m3-preset/1``:

    {
      "schema": "m3-preset/1",
      "id": "board1",
      "width": 7, "height": 7, "num_colors": 6,
      "grid": [[...], ...],          # height rows of width color ids
      "queues": [[...], ...],        # width per-column refill queues
      "fallback_seed": 9             # optional, used when queues run out
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .board import BoardConfig
from .errors import ConfigError
from .game import GameState, new_game
from .refill import RefillSource

PRESET_SCHEMA = "m3-preset/1"


@dataclass
class Preset:
    id: str
    width: int
    height: int
    num_colors: int
    grid: list[list[int]]
    queues: list[list[int]] = field(default_factory=list)
    fallback_seed: int = 0

    def validate(self) -> None:
        if len(self.grid) != self.height or any(len(r) != self.width for r in self.grid):
            raise ConfigError(f"preset {self.id}: grid is not {self.height}x{self.width}")
        arr = np.array(self.grid, dtype=np.int8)
        if arr.min() < 0 or arr.max() >= self.num_colors:
            raise ConfigError(f"preset {self.id}: grid colors out of range")
        if kernels.has_match(arr):
            raise ConfigError(f"preset {self.id}: grid contains pre-existing matches")
        if self.queues and len(self.queues) != self.width:
            raise ConfigError(f"preset {self.id}: need one queue per column")

    def board_config(self, moves_per_game: int = 20) -> BoardConfig:
        return BoardConfig(
            width=self.width,
            height=self.height,
            num_colors=self.num_colors,
            moves_per_game=moves_per_game,
        )

    def new_game(self, moves_per_game: int = 20) -> GameState:
        config = self.board_config(moves_per_game)
        refill = RefillSource.scripted(
            self.queues or [[] for _ in range(self.width)],
            self.fallback_seed,
            self.num_colors,
        )
        return new_game(config, refill, initial_grid=self.grid)

    def to_dict(self) -> dict:
        return {
            "schema": PRESET_SCHEMA,
            "id": self.id,
            "width": self.width,
            "height": self.height,
            "num_colors": self.num_colors,
            "grid": self.grid,
            "queues": self.queues,
            "fallback_seed": self.fallback_seed,
        }

    @classmethod
    def from_dict(cls, data: dict, default_id: str = "preset") -> "Preset":
        if data.get("schema") != PRESET_SCHEMA:
            raise ConfigError(f"unsupported preset schema: {data.get('schema')!r}")
        preset = cls(
            id=str(data.get("id", default_id)),
            width=int(data["width"]),
            height=int(data["height"]),
            num_colors=int(data["num_colors"]),
            grid=[[int(x) for x in row] for row in data["grid"]],
            queues=[[int(x) for x in q] for q in data.get("queues", [])],
            fallback_seed=int(data.get("fallback_seed", 0)),
        )
        preset.validate()
        return preset


def save_preset(preset: Preset, path: Path | str) -> None:
    Path(path).write_text(json.dumps(preset.to_dict(), indent=2) + "\n")


def load_preset(path: Path | str) -> Preset:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"preset {path}: not valid JSON ({exc})") from exc
    return Preset.from_dict(data, default_id=path.stem)


def load_preset_dir(directory: Path | str) -> list[Preset]:
    """All presets in a directory, sorted by id for stable round plans."""
    presets = [load_preset(p) for p in sorted(Path(directory).glob("*.json"))]
    return sorted(presets, key=lambda p: p.id)


def make_sample_presets(
    out_dir: Path | str,
    count: int = 3,
    seed: int = 99,
    queue_length: int = 60,
    config: BoardConfig | None = None,
) -> list[Preset]:
    """Generate preset files with match-free starting grids and scripted
    refill queues long enough for a scored 20-move round."""
    config = config or BoardConfig()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    presets = []
    for k in range(count):
        refill = RefillSource.seeded(seed + k, config.width)
        state = new_game(config, refill)
        queue_rng = kernels.new_rng_state(seed + 1000 + k)
        queues = [
            [int(kernels.rand_below(queue_rng, config.num_colors)) for _ in range(queue_length)]
            for _ in range(config.width)
        ]
        preset = Preset(
            id=f"board{k + 1}",
            width=config.width,
            height=config.height,
            num_colors=config.num_colors,
            grid=[[int(x) for x in row] for row in state.grid],
            queues=queues,
            fallback_seed=seed + 2000 + k,
        )
        preset.validate()
        save_preset(preset, out / f"{preset.id}.json")
        presets.append(preset)
    return presets
